"""Bit-string Hamiltonians, partition functions, Gibbs states and overlaps.

The central objects are hidden bit strings b of length N with Hamiltonian
energy(x) = 1 - b_x on the domain {1, ..., N}, so the zero-temperature
partition function counts the ones of b. Every closed-form expression here
has a brute-force partner path and the two are cross-checked in the tests.

beta = math.inf is the distinguished zero-temperature value; e^{-beta} is
exactly 0.0 there, which keeps all closed forms finite and overflow-free.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    DeltaOutOfRange,
    EmptyGroundSpace,
    EnergyOutOfRange,
    IndexOutOfRange,
    InfeasiblePair,
    WeightOutOfRange,
)
from .statevector import StateVector, trial_rng

INFINITY = math.inf


@dataclass(frozen=True)
class BitStringInstance:
    """A hidden string b in {0,1}^N together with its cached weight."""

    N: int
    bits: np.ndarray = field(repr=False)
    weight: int
    seed: int = 0

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8)
        if self.N < 1 or bits.shape != (self.N,):
            raise WeightOutOfRange(f"need N >= 1 bits, got N={self.N}, shape {bits.shape}")
        if not np.isin(bits, (0, 1)).all():
            raise WeightOutOfRange("bits must be 0/1 valued")
        w = int(bits.sum())
        if w != self.weight:
            raise WeightOutOfRange(f"cached weight {self.weight} != actual {w}")
        bits = bits.copy()
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @property
    def ones_mask(self) -> np.ndarray:
        """Boolean mask (0-based basis indices) of the zero-energy sites b_x = 1."""
        return self.bits == 1

    def fingerprint(self) -> tuple:
        """Hashable identity used for circuit caching."""
        digest = hashlib.sha256(self.bits.tobytes()).hexdigest()[:16]
        return (self.N, self.weight, digest)


def build_instance(
    N: int,
    *,
    weight: Optional[int] = None,
    bits=None,
    bernoulli_p: Optional[float] = None,
    seed: int = 0,
) -> BitStringInstance:
    """Construct an instance from exactly one of the three specifications.

    weight=w       seeded uniformly random placement of w ones
    bits=[...]     explicit 0/1 sequence
    bernoulli_p=p  i.i.d. Bernoulli(p) bits, seeded
    """
    modes = sum(x is not None for x in (weight, bits, bernoulli_p))
    if modes != 1:
        raise WeightOutOfRange("specify exactly one of weight / bits / bernoulli_p")
    if N < 1:
        raise WeightOutOfRange(f"need N >= 1, got {N}")
    if bits is not None:
        arr = np.asarray(bits, dtype=np.uint8)
        return BitStringInstance(N, arr, int(arr.sum()), seed)
    rng = trial_rng(seed, 0)
    if weight is not None:
        if not 0 <= weight <= N:
            raise WeightOutOfRange(f"weight {weight} outside [0, {N}]")
        arr = np.zeros(N, dtype=np.uint8)
        arr[rng.choice(N, size=weight, replace=False)] = 1
        return BitStringInstance(N, arr, weight, seed)
    if not 0.0 <= bernoulli_p <= 1.0:
        raise WeightOutOfRange(f"Bernoulli probability {bernoulli_p} outside [0, 1]")
    arr = (rng.random(N) < bernoulli_p).astype(np.uint8)
    return BitStringInstance(N, arr, int(arr.sum()), seed)


def hamiltonian_eval(inst: BitStringInstance, x: int) -> int:
    """Energy 1 - b_x at 1-based site x (the paper-facing indexing)."""
    if not 1 <= x <= inst.N:
        raise IndexOutOfRange(f"site {x} outside [1, {inst.N}]")
    return int(1 - inst.bits[x - 1])


@dataclass(frozen=True)
class GibbsModel:
    """A general small-integer Hamiltonian over a finite domain at one beta."""

    domain_size: int
    energies: np.ndarray = field(repr=False)
    beta: float
    max_energy: int = 0

    def __post_init__(self) -> None:
        e = np.asarray(self.energies)
        if self.domain_size < 1 or e.shape != (self.domain_size,):
            raise EnergyOutOfRange("need one energy per domain element")
        if not np.issubdtype(e.dtype, np.integer):
            raise EnergyOutOfRange("energies must be integers (general reals rejected)")
        n = self.max_energy if self.max_energy else int(e.max(initial=0))
        if (e < 0).any() or (e > n).any():
            raise EnergyOutOfRange(f"energies must lie in {{0, ..., {n}}}")
        if not self.beta >= 0:
            raise EnergyOutOfRange(f"beta must be >= 0, got {self.beta}")
        e = e.astype(np.int64)
        e.flags.writeable = False
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "max_energy", n)

    @classmethod
    def from_instance(cls, inst: BitStringInstance, beta: float) -> "GibbsModel":
        return cls(inst.N, (1 - inst.bits).astype(np.int64), beta, 1)


def partition_function_bruteforce(model: GibbsModel) -> float:
    """Direct sum of e^{-beta*E(x)}; at beta = inf, the zero-energy count."""
    if math.isinf(model.beta):
        return float(np.count_nonzero(model.energies == 0))
    return float(np.exp(-model.beta * model.energies.astype(float)).sum())


def partition_function_closed(inst: BitStringInstance, beta: float) -> float:
    """w + (N - w) e^{-beta} for the bit-string Hamiltonian."""
    if not beta >= 0:
        raise EnergyOutOfRange(f"beta must be >= 0, got {beta}")
    w = inst.weight
    if math.isinf(beta):
        return float(w)
    return w + (inst.N - w) * math.exp(-beta)


def gibbs_distribution(model: GibbsModel) -> np.ndarray:
    """Probabilities e^{-beta*E(x)} / Z(beta) over the domain."""
    if math.isinf(model.beta):
        ground = model.energies == 0
        count = int(np.count_nonzero(ground))
        if count == 0:
            raise EmptyGroundSpace("beta = inf requires a zero-energy configuration")
        probs = np.where(ground, 1.0 / count, 0.0)
        return probs
    weights = np.exp(-model.beta * model.energies.astype(float))
    return weights / weights.sum()


def gibbs_state_exact(model: GibbsModel) -> StateVector:
    """The coherent encoding: real nonnegative amplitudes sqrt(mu(x))."""
    probs = gibbs_distribution(model)
    return StateVector(model.domain_size, np.sqrt(probs).astype(np.complex128))


def gibbs_state_for_instance(inst: BitStringInstance, beta: float) -> StateVector:
    return gibbs_state_exact(GibbsModel.from_instance(inst, beta))


def wrong_weight_state(
    inst: BitStringInstance, assumed_weight: int, beta: float
) -> StateVector:
    """The state produced by a preparation that believes the wrong weight.

    The amplitude split between the one-sites and zero-sites of the true
    string follows the assumed weight's partition function; the support is
    still the true instance's.
    """
    if not 1 <= assumed_weight <= inst.N:
        raise WeightOutOfRange(f"assumed weight {assumed_weight} outside [1, {inst.N}]")
    if inst.weight < 1:
        raise EmptyGroundSpace("true instance has no one-bits")
    w_true, n = inst.weight, inst.N
    expb = 0.0 if math.isinf(beta) else math.exp(-beta)
    z_assumed = assumed_weight + (n - assumed_weight) * expb
    amp_target = math.sqrt(assumed_weight / z_assumed)
    amp_rest = math.sqrt(max(0.0, 1.0 - amp_target**2))
    amps = np.where(
        inst.ones_mask,
        amp_target / math.sqrt(w_true),
        amp_rest / math.sqrt(n - w_true) if n > w_true else 0.0,
    ).astype(np.complex128)
    return StateVector(n, amps)


def overlap_wrong_weight_closed(delta: float, beta: float) -> float:
    """|<mu_beta | mu_beta^wrong>| for the weight pair N(1/2 +- delta).

    sqrt(1/4 - delta^2) / sqrt(1/4 - delta^2 ((1-e^-b)/(1+e^-b))^2);
    equals sqrt(1 - 4 delta^2) at beta = 0 and exactly 1 at beta = inf,
    and is symmetric in which of the two weights is the true one.
    """
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    expb = 0.0 if math.isinf(beta) else math.exp(-beta)
    ratio = (1.0 - expb) / (1.0 + expb)
    return math.sqrt(0.25 - delta**2) / math.sqrt(0.25 - (delta * ratio) ** 2)


@dataclass(frozen=True)
class PairedInstance:
    """The two-hypothesis family: weights N(1/2 + delta) vs N(1/2 - delta)."""

    N: int
    delta: float
    heavy: BitStringInstance
    light: BitStringInstance

    def __post_init__(self) -> None:
        _check_pair_feasible(self.N, self.delta)
        lo, hi = _pair_weights(self.N, self.delta)
        if self.light.weight != lo or self.heavy.weight != hi:
            raise InfeasiblePair(
                f"expected weights {lo}/{hi}, got {self.light.weight}/{self.heavy.weight}"
            )

    @classmethod
    def build(cls, N: int, delta: float, seed: int = 0) -> "PairedInstance":
        lo, hi = _pair_weights(N, delta)
        heavy = build_instance(N, weight=hi, seed=seed)
        light = build_instance(N, weight=lo, seed=seed + 1)
        return cls(N, delta, heavy, light)


def _pair_weights(N: int, delta: float) -> tuple[int, int]:
    _check_pair_feasible(N, delta)
    return round(N * (0.5 - delta)), round(N * (0.5 + delta))


def _check_pair_feasible(N: int, delta: float) -> None:
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    if 2 * N * delta < 1 - 1e-12:
        raise InfeasiblePair(f"need 2*N*delta >= 1, got {2 * N * delta}")
    for side in (0.5 - delta, 0.5 + delta):
        target = N * side
        if abs(target - round(target)) > 1e-9:
            raise InfeasiblePair(
                f"N*(1/2 +- delta) must be integers; N={N}, delta={delta} gives {target}"
            )


def feasible_pair_size(delta: float, minimum: int = 2) -> int:
    """Smallest N >= minimum making the paired weights exact integers.

    Rounds N up; never rounds delta.
    """
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    n = max(2, minimum)
    for candidate in range(n, n + 10**6):
        try:
            _check_pair_feasible(candidate, delta)
        except InfeasiblePair:
            continue
        return candidate
    raise InfeasiblePair(f"no feasible N found near {minimum} for delta={delta}")


def write_instance(inst: BitStringInstance) -> str:
    """Serialize to the interchange text format.

    Header line "N <int> weight <int> seed <int>", then the bits as one
    0/1 character string.
    """
    return (
        f"N {inst.N} weight {inst.weight} seed {inst.seed}\n"
        + "".join("1" if b else "0" for b in inst.bits)
        + "\n"
    )


def read_instance(text: str) -> BitStringInstance:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise WeightOutOfRange("instance text must be a header line plus a bit line")
    parts = lines[0].split()
    if len(parts) != 6 or parts[0] != "N" or parts[2] != "weight" or parts[4] != "seed":
        raise WeightOutOfRange(f"malformed instance header: {lines[0]!r}")
    n, w, seed = int(parts[1]), int(parts[3]), int(parts[5])
    bits = np.fromiter((c == "1" for c in lines[1]), dtype=np.uint8, count=len(lines[1]))
    if bits.size != n:
        raise WeightOutOfRange(f"header N={n} but {bits.size} bits given")
    inst = BitStringInstance(n, bits, int(bits.sum()), seed)
    if inst.weight != w:
        raise WeightOutOfRange(f"header weight {w} != actual {inst.weight}")
    return inst
