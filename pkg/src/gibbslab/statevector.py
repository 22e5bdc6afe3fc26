"""Dense state-vector simulation with instrumented oracle accounting.

States live over an arbitrary finite basis {0, ..., D-1} (no qubit structure
is assumed: the constructions here only ever need diagonal phase oracles and
rank-1 reflections). Amplitudes are double-precision complex and every public
operation returns a fresh, normalized StateVector; norm drift beyond 1e-10 is
an error, never silently repaired.

Oracle cost is tracked by a QueryLedger. A marked-set phase flip counts as
exactly one Hamiltonian-oracle query; because every Hamiltonian in this
laboratory is of the bit-string form (energy = 1 - b_x), each such query is
simultaneously one query to the underlying bit oracle, so the two counters
advance in lockstep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    NormalizationError,
    UnnormalizedAxis,
    ZeroDimension,
)

NORM_TOL = 1e-10
AXIS_TOL = 1e-8
MAX_DIMENSION = 2**20

MarkedSpec = Union[Callable[[int], bool], Sequence[int], np.ndarray]


@dataclass
class QueryLedger:
    """Monotone counters for oracle queries, preparations and reflections.

    ob_queries mirrors oh_queries one-for-one: simulating one Hamiltonian
    query on a bit-string Hamiltonian costs exactly one bit-oracle query.
    """

    ob_queries: int = 0
    oh_queries: int = 0
    preparations: int = 0
    reflections: int = 0

    def record_oh(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError(f"ledger counters are monotone, got increment {n}")
        self.oh_queries += n
        self.ob_queries += n

    def record_preparation(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError(f"ledger counters are monotone, got increment {n}")
        self.preparations += n

    def record_reflection(self, n: int = 1) -> None:
        if n < 0:
            raise ValueError(f"ledger counters are monotone, got increment {n}")
        self.reflections += n

    def snapshot(self) -> "QueryLedger":
        return QueryLedger(
            self.ob_queries, self.oh_queries, self.preparations, self.reflections
        )

    def delta(self, earlier: "QueryLedger") -> "QueryLedger":
        """Counter differences since an earlier snapshot."""
        return QueryLedger(
            self.ob_queries - earlier.ob_queries,
            self.oh_queries - earlier.oh_queries,
            self.preparations - earlier.preparations,
            self.reflections - earlier.reflections,
        )


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over a basis of fixed dimension."""

    dimension: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.dimension == 0 or amps.size == 0:
            raise ZeroDimension("state vector dimension must be >= 1")
        if self.dimension > MAX_DIMENSION:
            raise DimensionTooLarge(
                f"dimension {self.dimension} exceeds dense cap {MAX_DIMENSION}"
            )
        if amps.shape != (self.dimension,):
            raise DimensionMismatch(
                f"expected {self.dimension} amplitudes, got shape {amps.shape}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"norm {norm!r} deviates from 1 beyond {NORM_TOL}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def init_uniform(dimension: int) -> StateVector:
    """Uniform superposition 1/sqrt(D) over every basis element."""
    if dimension == 0:
        raise ZeroDimension("cannot build the uniform state on an empty basis")
    amps = np.full(dimension, 1.0 / np.sqrt(dimension), dtype=np.complex128)
    return StateVector(dimension, amps)


def basis_state(dimension: int, index: int) -> StateVector:
    amps = np.zeros(dimension, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(dimension, amps)


def marked_mask(dimension: int, marked: MarkedSpec) -> np.ndarray:
    """Normalize a marked-set specification to a boolean mask.

    Accepts a predicate over basis indices, an index sequence, or a boolean
    mask of the right length.
    """
    if callable(marked):
        return np.fromiter((bool(marked(i)) for i in range(dimension)), dtype=bool,
                           count=dimension)
    arr = np.asarray(marked)
    if arr.dtype == bool:
        if arr.shape != (dimension,):
            raise DimensionMismatch(
                f"marked mask of shape {arr.shape} does not cover dimension {dimension}"
            )
        return arr
    mask = np.zeros(dimension, dtype=bool)
    idx = arr.astype(np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= dimension):
        raise DimensionMismatch("marked index outside the basis range")
    mask[idx] = True
    return mask


def apply_marked_phase_flip(
    state: StateVector,
    marked: MarkedSpec,
    phase: float,
    ledger: QueryLedger,
) -> StateVector:
    """Multiply amplitudes on the marked set by e^{i*phase}.

    One call is accounted as exactly one Hamiltonian-oracle query regardless
    of the phase value (the oracle is consumed once by the kickback ancilla).
    """
    mask = marked_mask(state.dimension, marked)
    amps = state.amplitudes.copy()
    amps[mask] *= np.exp(1j * phase)
    ledger.record_oh(1)
    return StateVector(state.dimension, amps)


def apply_reflection_about(
    state: StateVector, axis: StateVector, phase: float
) -> StateVector:
    """Apply I + (e^{i*phase} - 1)|axis><axis| to the state.

    phase = pi gives the full reflection 2|axis><axis| - I up to global sign.
    Reflections about explicitly known states cost no oracle queries.
    """
    if state.dimension != axis.dimension:
        raise DimensionMismatch(
            f"state dimension {state.dimension} vs axis dimension {axis.dimension}"
        )
    axis_norm = float(np.linalg.norm(axis.amplitudes))
    if abs(axis_norm - 1.0) > AXIS_TOL:
        raise UnnormalizedAxis(f"axis norm {axis_norm!r} deviates from 1 beyond {AXIS_TOL}")
    overlap = np.vdot(axis.amplitudes, state.amplitudes)
    amps = state.amplitudes + (np.exp(1j * phase) - 1.0) * overlap * axis.amplitudes
    return StateVector(state.dimension, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions {a.dimension} and {b.dimension} differ")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 (global phase is unobservable)."""
    return abs(inner_product(a, b)) ** 2


def measure_sample(state: StateVector, rng: np.random.Generator) -> int:
    """Draw one computational-basis index with Born probabilities."""
    return int(measure_samples(state, rng, 1)[0])


def measure_samples(
    state: StateVector, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Vectorized repeated measurement: `size` independent basis draws."""
    p = state.probabilities
    p = p / p.sum()
    return rng.choice(state.dimension, size=size, p=p)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based per-trial stream, keyed by (master_seed, trial_index).

    Philox keys give independent streams so trials can run in any order or
    in parallel and still replay exactly.
    """
    key = np.array([master_seed % 2**64, trial_index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def state_from_amplitudes(amps: Iterable[complex]) -> StateVector:
    arr = np.asarray(list(amps) if not isinstance(amps, np.ndarray) else amps,
                     dtype=np.complex128)
    return StateVector(arr.size, arr)
