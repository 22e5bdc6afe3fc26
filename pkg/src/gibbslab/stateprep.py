"""Fixed-point search, Gibbs-state preparation, and reflections through them.

Everything here acts inside the two-dimensional invariant subspace spanned by
the normalized marked-set state |T> and the normalized unmarked-set state
|T_perp>: the only primitives are marked-set partial phases (oracle queries)
and reflections about explicitly known axes (free). That makes exact query
accounting possible, which is the point of the laboratory.

Query-count convention (documented because several are defensible): a
schedule of length L (odd) consists of (L-1)/2 generalized iterate pairs
(alpha_j, beta_j) plus one closing pi flip. Each pair's target partial phase
is executed as two half-phase oracle calls, mirroring the compute/uncompute
kickback that realizes a partial phase from a binary oracle; the closing pi
flip needs a single call (a |-> ancilla kickback is self-inverse). Total
oracle calls = exactly L, matching the degree of the amplified response
polynomial. The closing flip multiplies the marked component by -1 and leaves
every success probability unchanged. The degenerate L = 1 schedule is a
single standard Grover pair (pi, pi) whose pi flip costs the one query.

Phase pairs follow the Chebyshev construction of fixed-point search (Yoder,
Low and Chuang's optimal-query sequence): with gamma^-1 = T_{1/L}(1/eta) and
a_j = 2*arccot(tan(2*pi*j/L) * sqrt(1 - gamma^2)), iterate j applies the
marked partial phase beta_j = a_{l-j+1} followed by the uniform-axis phase
alpha_j = a_j, phases read against the simulator's e^{+i*phase} operators.
Schedules are built for a fractionally tightened eta so the success floor
1 - eta^2 holds strictly under floating-point arithmetic; the simulated
response is checked against the closed-form Chebyshev curve in the tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyTarget,
    EvenL,
    GibbslabError,
    WeightOutOfRange,
)
from .gibbs import BitStringInstance
from .statevector import (
    QueryLedger,
    StateVector,
    apply_marked_phase_flip,
    apply_reflection_about,
    init_uniform,
    marked_mask,
)

_ETA_TIGHTEN = 1.0 - 1e-3
_ANGLE_TOL = 1e-13
_STEP_SAFETY = 1.0 - 1e-9


@dataclass(frozen=True)
class PhaseSchedule:
    """Phases for one fixed-point search of query count L (odd)."""

    query_count: int
    pairs: tuple[tuple[float, float], ...]
    eta: float

    @property
    def degenerate(self) -> bool:
        return self.query_count == 1


@dataclass(frozen=True)
class PrepSpec:
    """What a preparation believes: beta, the assumed weight, and eta."""

    beta: float
    assumed_weight: int
    eta: float
    N: int

    def __post_init__(self) -> None:
        if not 1 <= self.assumed_weight <= self.N:
            raise WeightOutOfRange(
                f"assumed weight {self.assumed_weight} outside [1, {self.N}]"
            )
        if not 0.0 < self.eta <= 1.0:
            raise WeightOutOfRange(f"eta {self.eta} outside (0, 1]")
        if not self.beta >= 0:
            raise WeightOutOfRange(f"beta must be >= 0, got {self.beta}")


def _tuned_eta(eta: float) -> float:
    return eta * _ETA_TIGHTEN


def _gamma(L: int, eta_hat: float) -> float:
    # gamma^-1 = T_{1/L}(1/eta_hat), evaluated through cosh/arccosh
    return 1.0 / math.cosh(math.acosh(1.0 / eta_hat) / L)


def success_floor_width(L: int, eta: float) -> float:
    """Smallest marked fraction for which the 1 - eta^2 floor is certified."""
    if L < 1 or L % 2 == 0:
        raise EvenL(f"query count must be odd and positive, got {L}")
    if L == 1:
        # single Grover pair: exact response sin^2(3*asin(sqrt(lambda)))
        eta_hat = _tuned_eta(eta)
        lo, hi = 0.75, 1.0
        if math.sin(3 * math.asin(math.sqrt(hi))) ** 2 < 1 - eta_hat**2:
            return 1.0 + 1e-9  # floor unattainable except trivially
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if math.sin(3 * math.asin(math.sqrt(mid))) ** 2 >= 1 - eta_hat**2:
                hi = mid
            else:
                lo = mid
        return hi
    g = _gamma(L, _tuned_eta(eta))
    return 1.0 - g * g


def fixed_point_response(L: int, eta: float, lam: float) -> float:
    """Closed-form success probability of the L-query schedule at overlap lam.

    Used as the independent oracle against the simulated circuit.
    """
    if L == 1:
        return math.sin(3 * math.asin(math.sqrt(lam))) ** 2
    eta_hat = _tuned_eta(eta)
    arg = math.sqrt(max(0.0, 1.0 - lam)) / _gamma(L, eta_hat)
    if arg <= 1.0:
        t = math.cos(L * math.acos(arg))
    else:
        t = math.cosh(L * math.acosh(arg))
    return 1.0 - (eta_hat * t) ** 2


def fixed_point_phase_schedule(L: int, eta: float) -> PhaseSchedule:
    """Phase pairs for a search of odd query count L at floor parameter eta."""
    if L < 1 or L % 2 == 0:
        raise EvenL(f"query count must be odd and positive, got {L}")
    if not 0.0 < eta <= 1.0:
        raise WeightOutOfRange(f"eta {eta} outside (0, 1]")
    if L == 1:
        return PhaseSchedule(1, ((math.pi, math.pi),), eta)
    eta_hat = _tuned_eta(eta)
    l = (L - 1) // 2
    g = _gamma(L, eta_hat)
    sg = math.sqrt(max(0.0, 1.0 - g * g))
    a = [2.0 * math.atan2(1.0, math.tan(2.0 * math.pi * j / L) * sg) for j in range(1, l + 1)]
    pairs = tuple((a[j], a[l - 1 - j]) for j in range(l))
    return PhaseSchedule(L, pairs, eta)


def minimal_query_count(lambda_lower: float, eta: float) -> int:
    """Smallest odd L whose certified floor covers marked fractions >= lambda_lower."""
    if not 0.0 < lambda_lower <= 1.0:
        raise WeightOutOfRange(f"lambda_lower {lambda_lower} outside (0, 1]")
    if not 0.0 < eta <= 1.0:
        raise WeightOutOfRange(f"eta {eta} outside (0, 1]")
    if success_floor_width(1, eta) <= lambda_lower:
        return 1
    eta_hat = _tuned_eta(eta)
    # analytic starting point: L* = arccosh(1/eta)/arccosh(1/sqrt(1-lambda))
    denom = math.acosh(1.0 / math.sqrt(1.0 - lambda_lower)) if lambda_lower < 1 else None
    if denom is None or denom == 0.0:
        start = 3
    else:
        start = max(3, math.ceil(math.acosh(1.0 / eta_hat) / denom))
    L = start if start % 2 == 1 else start + 1
    while success_floor_width(L, eta) > lambda_lower:
        L += 2
    while L >= 5 and success_floor_width(L - 2, eta) <= lambda_lower:
        L -= 2
    return L


def schedule_dump(schedule: PhaseSchedule) -> str:
    """Audit format: one line "j alpha_j beta_j" per pair."""
    lines = [
        f"{j + 1} {alpha:.17g} {beta:.17g}"
        for j, (alpha, beta) in enumerate(schedule.pairs)
    ]
    return "\n".join(lines) + "\n"


# --- circuit representation -------------------------------------------------
#
# A circuit is a tuple of ("flip", phase) and ("sref", phase) ops. "flip"
# applies the marked-set partial phase (one oracle query per op); "sref"
# applies a phase reflection about the uniform state (free). Inverses are the
# reversed op list with negated phases.


def _schedule_ops(schedule: PhaseSchedule) -> tuple:
    if schedule.degenerate:
        return (("flip", math.pi), ("sref", math.pi))
    ops: list[tuple[str, float]] = []
    for alpha, beta in schedule.pairs:
        ops.append(("flip", beta / 2.0))
        ops.append(("flip", beta / 2.0))
        ops.append(("sref", alpha))
    ops.append(("flip", math.pi))
    return tuple(ops)


def _invert_ops(ops: tuple) -> tuple:
    return tuple((kind, -phase) for kind, phase in reversed(ops))


def _oracle_cost(ops: tuple) -> int:
    return sum(1 for kind, _ in ops if kind == "flip")


def _apply_ops(
    state: StateVector,
    ops: tuple,
    mask: np.ndarray,
    axis: StateVector,
    ledger: QueryLedger,
) -> StateVector:
    for kind, phase in ops:
        if kind == "flip":
            state = apply_marked_phase_flip(state, mask, phase, ledger)
        else:
            state = apply_reflection_about(state, axis, phase)
    return state


def fixed_point_search(
    marked,
    N: int,
    lambda_lower: float,
    eta: float,
    ledger: QueryLedger,
) -> StateVector:
    """Amplify the marked subspace of the uniform state.

    Whenever the true marked fraction is at least lambda_lower, the output's
    marked-subspace weight is at least 1 - eta^2; overlaps below the floor
    are not detectable here and remain the caller's responsibility. Consumes
    exactly minimal_query_count(lambda_lower, eta) oracle queries.
    """
    mask = marked_mask(N, marked)
    if not mask.any():
        raise EmptyTarget("no marked index in the search domain")
    L = minimal_query_count(lambda_lower, eta)
    schedule = fixed_point_phase_schedule(L, eta)
    state = init_uniform(N)
    return _apply_ops(state, _schedule_ops(schedule), mask, init_uniform(N), ledger)


# --- exact two-subspace rotations -------------------------------------------
#
# States in span{|T_perp>, |T>} are tracked through their real representative
# (cos phi, sin phi) times a global phase. One generalized iterate can move
# the representative toward the uniform axis (solver A: uniform-phase then
# marked-phase) or away from it (solver B: marked-phase then uniform-phase);
# each solved step costs two half-phase oracle calls.


def _wrap_angle(x: float) -> float:
    return math.atan2(math.sin(x), math.cos(x))


def _check_step(
    alpha: float, beta: float, order: str, phi1: float, phi_star: float, theta: float
) -> Optional[tuple]:
    """Verify a candidate (alpha, beta) maps phi1 onto phi_star; emit ops."""
    u = np.array([math.cos(theta), math.sin(theta)])
    v = np.array([math.cos(phi1), math.sin(phi1)], dtype=complex)
    if order == "su":
        x = v + (cmath.exp(1j * alpha) - 1.0) * (u @ v) * u
        y = np.array([x[0], cmath.exp(1j * beta) * x[1]])
        ops = (("sref", alpha), ("flip", beta / 2.0), ("flip", beta / 2.0))
    else:
        x = np.array([v[0], cmath.exp(1j * beta) * v[1]])
        y = x + (cmath.exp(1j * alpha) - 1.0) * (u @ x) * u
        ops = (("flip", beta / 2.0), ("flip", beta / 2.0), ("sref", alpha))
    w = np.array([math.cos(phi_star), math.sin(phi_star)])
    if abs(abs(np.conj(w) @ y) - 1.0) < 1e-9:
        return ops
    return None


def _solve_toward_axis(phi1: float, phi_star: float, theta: float) -> Optional[tuple]:
    """Solver A: uniform-phase first. Moves the representative toward theta."""
    q = math.sin(theta) * math.cos(phi1 - theta)
    den = 2.0 * q * (math.sin(phi1) - q)
    num = math.sin(phi1) ** 2 - math.sin(phi_star) ** 2
    if abs(den) < 1e-300:
        return None
    one_minus_cos = num / den
    if not -1e-9 <= one_minus_cos <= 2.0 + 1e-9:
        return None
    alpha = math.acos(min(1.0, max(-1.0, 1.0 - one_minus_cos)))
    for a in (alpha, -alpha):
        x_t = math.sin(phi1) + (cmath.exp(1j * a) - 1.0) * q
        x_p = math.cos(phi1) + (cmath.exp(1j * a) - 1.0) * math.cos(theta) * math.cos(
            phi1 - theta
        )
        if abs(x_t) < 1e-300:
            beta = 0.0
        else:
            beta = _wrap_angle(cmath.phase(x_p) - cmath.phase(x_t))
        ops = _check_step(a, beta, "su", phi1, phi_star, theta)
        if ops:
            return ops
    return None


def _solve_away_from_axis(phi1: float, phi_star: float, theta: float) -> Optional[tuple]:
    """Solver B: marked-phase first. Moves the representative away from theta."""
    st, ct = math.sin(theta), math.cos(theta)
    s1, c1 = math.sin(phi1), math.cos(phi1)
    den = 2.0 * st * ct * s1 * c1
    num = (st * c1) ** 2 + (ct * s1) ** 2 - math.sin(phi_star - theta) ** 2
    if abs(den) < 1e-300:
        return None
    cos_beta = num / den
    if not -1.0 - 1e-9 <= cos_beta <= 1.0 + 1e-9:
        return None
    beta0 = math.acos(min(1.0, max(-1.0, cos_beta)))
    rho_w = math.sin(phi_star - theta)
    for b in (beta0, -beta0):
        p = ct * c1 + cmath.exp(1j * b) * st * s1
        rho = -st * c1 + cmath.exp(1j * b) * ct * s1
        if abs(rho_w) > 1e-300:
            gamma = cmath.phase(rho) - (math.pi if rho_w < 0 else 0.0)
        else:
            gamma = 0.0
        alpha = _wrap_angle(gamma - (cmath.phase(p) if abs(p) > 1e-300 else 0.0))
        ops = _check_step(alpha, b, "us", phi1, phi_star, theta)
        if ops:
            return ops
    return None


def _single_step(phi1: float, phi_star: float, theta: float) -> Optional[tuple]:
    return _solve_toward_axis(phi1, phi_star, theta) or _solve_away_from_axis(
        phi1, phi_star, theta
    )


def _rotation_ops(
    comp_perp: complex, comp_marked: complex, theta: float, phi_star: float
) -> tuple:
    """Ops mapping the current 2D state exactly onto angle phi_star.

    The first (alignment) flip equalizes the two components' phases so the
    later steps can work on the real representative; it is skipped when the
    state is already aligned.
    """
    ops: list[tuple[str, float]] = []
    mag_p, mag_t = abs(comp_perp), abs(comp_marked)
    if mag_p > _ANGLE_TOL and mag_t > _ANGLE_TOL:
        b0 = _wrap_angle(cmath.phase(comp_perp) - cmath.phase(comp_marked))
        if abs(b0) > _ANGLE_TOL:
            ops += [("flip", b0 / 2.0), ("flip", b0 / 2.0)]
    phi = math.atan2(mag_t, mag_p)
    if abs(phi - phi_star) <= _ANGLE_TOL:
        return tuple(ops)
    for _ in range(200):
        step = _single_step(phi, phi_star, theta)
        if step is not None:
            ops += list(step)
            return tuple(ops)
        # partial move: to the toward-axis mirror point, or one expansion hop
        if phi_star < phi:
            candidate = max(phi_star, abs(phi - 2.0 * theta) * (1.0 + 1e-9) + 1e-12)
        else:
            cap = theta + min(phi + theta, math.pi - phi - theta) * _STEP_SAFETY
            candidate = min(phi_star, max(phi + 1e-6, cap))
        candidate = min(max(candidate, 0.0), math.pi / 2.0)
        step = _single_step(phi, candidate, theta)
        if step is None:
            raise GibbslabError(
                f"rotation planner stuck at phi={phi} toward {phi_star} (theta={theta})"
            )
        ops += list(step)
        phi = candidate
    raise GibbslabError("rotation planner failed to converge in 200 steps")


# --- preparation circuits ----------------------------------------------------

_CIRCUIT_CACHE: dict = {}


@dataclass(frozen=True)
class PreparationCircuit:
    """A deterministic op sequence taking |s> to the believed Gibbs state."""

    ops: tuple
    oracle_cost: int
    prepared: np.ndarray

    def state(self) -> StateVector:
        return StateVector(self.prepared.size, self.prepared)


def _target_amplitude(spec: PrepSpec) -> float:
    expb = 0.0 if math.isinf(spec.beta) else math.exp(-spec.beta)
    z_assumed = spec.assumed_weight + (spec.N - spec.assumed_weight) * expb
    return math.sqrt(spec.assumed_weight / z_assumed)


def build_preparation_circuit(
    inst: BitStringInstance, spec: PrepSpec
) -> PreparationCircuit:
    """Search-then-rotate circuit preparing the assumed-weight Gibbs state.

    For beta > 0 the circuit is a fixed-point search toward the marked
    subspace followed by an exact rotation that places the marked amplitude
    at sqrt(w_assumed / Z_assumed(beta)); at beta = 0 the target is within
    one rotation of the uniform state, so the search is skipped (zero oracle
    queries when the assumed weight matches reality).

    The rotation phases are solved against the simulated state, so the
    output equals the believed Gibbs state to machine precision; query costs
    are charged for every oracle-consuming op in the sequence.
    """
    if spec.N != inst.N:
        raise DimensionMismatch(f"spec.N={spec.N} but instance N={inst.N}")
    if inst.weight < 1:
        raise EmptyTarget("instance has no one-bits; the target subspace is empty")
    key = (inst.fingerprint(), spec.beta, spec.assumed_weight, spec.eta)
    cached = _CIRCUIT_CACHE.get(key)
    if cached is not None:
        return cached

    n, w_true = inst.N, inst.weight
    mask = inst.ones_mask
    axis = init_uniform(n)
    theta = math.asin(math.sqrt(w_true / n))
    phi_star = math.asin(min(1.0, _target_amplitude(spec)))
    scratch = QueryLedger()

    ops: tuple = ()
    state = init_uniform(n)
    if spec.beta > 0:
        L = minimal_query_count(spec.assumed_weight / n, spec.eta)
        ops = _schedule_ops(fixed_point_phase_schedule(L, spec.eta))
        state = _apply_ops(state, ops, mask, axis, scratch)
    if w_true < n:
        comp_t = state.amplitudes[mask].sum() / math.sqrt(w_true)
        comp_p = state.amplitudes[~mask].sum() / math.sqrt(n - w_true)
        rot = _rotation_ops(comp_p, comp_t, theta, phi_star)
        state = _apply_ops(state, rot, mask, axis, scratch)
        ops = ops + rot

    circuit = PreparationCircuit(ops, _oracle_cost(ops), state.amplitudes)
    _CIRCUIT_CACHE[key] = circuit
    return circuit


def gibbs_prep_cost(inst: BitStringInstance, spec: PrepSpec) -> int:
    """Oracle queries consumed by one preparation with this belief."""
    return build_preparation_circuit(inst, spec).oracle_cost


def prepare_gibbs(
    inst: BitStringInstance, spec: PrepSpec, ledger: QueryLedger
) -> StateVector:
    """Prepare the Gibbs state the belief describes, charging oracle cost.

    With the correct assumed weight the output matches the exact Gibbs state
    (well inside the 1 - eta^2 floor); with a wrong assumed weight it is the
    wrong-weight state whose overlap with the truth follows the closed form.
    """
    circuit = build_preparation_circuit(inst, spec)
    ledger.record_oh(circuit.oracle_cost)
    ledger.record_preparation()
    return circuit.state()


def reflect_through_gibbs(
    state: StateVector,
    inst: BitStringInstance,
    spec: PrepSpec,
    ledger: QueryLedger,
) -> StateVector:
    """Apply 2|mu~><mu~| - I for the prepared (possibly imperfect) state.

    Realized as P (2|s><s| - I) P^-1 with P the preparation circuit, so each
    reflection costs exactly twice the preparation's oracle queries.
    """
    if state.dimension != inst.N:
        raise DimensionMismatch(f"state dim {state.dimension} vs instance N {inst.N}")
    circuit = build_preparation_circuit(inst, spec)
    mask = inst.ones_mask
    axis = init_uniform(inst.N)
    state = _apply_ops(state, _invert_ops(circuit.ops), mask, axis, ledger)
    state = apply_reflection_about(state, axis, math.pi)
    state = _apply_ops(state, circuit.ops, mask, axis, ledger)
    ledger.record_reflection()
    return state


def exact_rotation_prepare(
    inst: BitStringInstance, spec: PrepSpec, ledger: QueryLedger
) -> StateVector:
    """Cross-check path: rotate |s> directly to the believed target.

    Valid because the assumed weight pins the overlap angle; independent of
    the search schedule, so the two preparation routes validate each other.
    """
    if inst.weight < 1:
        raise EmptyTarget("instance has no one-bits; the target subspace is empty")
    n, w_true = inst.N, inst.weight
    mask = inst.ones_mask
    axis = init_uniform(n)
    state = init_uniform(n)
    if w_true < n:
        theta = math.asin(math.sqrt(w_true / n))
        phi_star = math.asin(min(1.0, _target_amplitude(spec)))
        rot = _rotation_ops(math.cos(theta), math.sin(theta), theta, phi_star)
        state = _apply_ops(state, rot, mask, axis, ledger)
    ledger.record_preparation()
    return state
