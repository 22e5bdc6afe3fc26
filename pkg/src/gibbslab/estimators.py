"""Estimators for the zero-temperature partition function.

The reflection-counted estimator drives a Grover operator built from one
Gibbs-state reflection plus one free uniform-state reflection, runs a
powers-of-two round schedule, and maximum-likelihood fits the marked-fraction
angle from per-round hit counts. The sample-counted estimator queries the
Hamiltonian at uniform sites. Both report their costs in an EstimateResult;
the `hit` flag is always computed against the carried ground truth, never
trusted from the estimator's internals.

Accounting note: reflections are charged per shot, as a hardware run would
re-execute the whole circuit for every measurement; the simulator reuses the
evolved state vector across the shots of a round, so the ledger charge is
applied in one batch per round. Shot outcomes are classified through the
instance's bit mask (the simulator stands in for the readout register), so
the ledger sees no oracle traffic outside preparations and reflections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import DeltaOutOfRange, EmptyTarget, WeightOutOfRange, ZeroBudget
from .gibbs import BitStringInstance, PairedInstance
from .statevector import (
    QueryLedger,
    StateVector,
    apply_reflection_about,
    init_uniform,
)
from .stateprep import PrepSpec, build_preparation_circuit, reflect_through_gibbs


class CoinVerdict(Enum):
    PLUS = "plus"
    MINUS = "minus"


class WeightVerdict(Enum):
    HEAVY = "heavy"
    LIGHT = "light"


@dataclass(frozen=True)
class EstimateResult:
    estimate: float
    target_epsilon: float
    oh_queries: int
    reflections: int
    classical_samples: int
    hit: bool


@dataclass(frozen=True)
class DistinguishResult:
    verdict: WeightVerdict
    estimate: float
    reflections: int
    budget_sufficed: bool


@dataclass(frozen=True)
class AmplificationPlan:
    """Round schedule for one maximum-likelihood amplitude estimation."""

    powers: tuple[int, ...]
    shots_per_round: int
    repetitions: int

    @property
    def reflections_per_repetition(self) -> int:
        return self.shots_per_round * sum(self.powers)

    @property
    def total_reflections(self) -> int:
        return self.repetitions * self.reflections_per_repetition


def median_repetitions(confidence: float) -> int:
    """ceil(12 * ln(1/(1-confidence))) independent repetitions, median taken."""
    if not 0.5 < confidence < 1.0:
        raise WeightOutOfRange(f"confidence {confidence} outside (1/2, 1)")
    return math.ceil(12.0 * math.log(1.0 / (1.0 - confidence)))


def plan_amplitude_rounds(
    N: int,
    assumed_weight: int,
    epsilon: float,
    confidence: float,
    shots_per_round: int = 24,
) -> AmplificationPlan:
    """Powers 0, 1, 2, ..., 2^(M-1) with M grown like log2(cot(theta)/epsilon).

    The cot factor turns the angle resolution the rounds buy into relative
    error on the weight; halving epsilon adds one doubling round, which is
    what produces the reflections ~ 1/epsilon scaling.
    """
    if not 0.0 < epsilon < 1.0:
        raise WeightOutOfRange(f"epsilon {epsilon} outside (0, 1)")
    if not 1 <= assumed_weight <= N:
        raise WeightOutOfRange(f"assumed weight {assumed_weight} outside [1, {N}]")
    cot = math.sqrt((N - assumed_weight) / assumed_weight)
    exponent = 3 if cot == 0.0 else max(3, math.ceil(math.log2(cot / epsilon)))
    exponent = min(exponent, 24)
    powers = (0,) + tuple(2**k for k in range(exponent))
    return AmplificationPlan(powers, shots_per_round, median_repetitions(confidence))


def _grover_step(
    state: StateVector,
    inst: BitStringInstance,
    spec: PrepSpec,
    scratch: QueryLedger,
    axis: StateVector,
) -> StateVector:
    state = reflect_through_gibbs(state, inst, spec, scratch)
    return apply_reflection_about(state, axis, math.pi)


def _mle_angle(powers, shots: int, goods) -> float:
    """Maximize the product of Bernoulli(sin^2((2m+1)theta)) likelihoods."""
    if all(g == shots for g in goods):
        return math.pi / 2  # saturated counts: the boundary maximizes exactly
    m_max = max(powers)
    grid_n = max(1024, 32 * (2 * m_max + 1))
    thetas = np.linspace(1e-7, math.pi / 2, grid_n)
    mult = 2 * np.asarray(powers, dtype=float) + 1.0
    goods_arr = np.asarray(goods, dtype=float)

    def loglike(t: np.ndarray) -> np.ndarray:
        p = np.sin(np.outer(t, mult)) ** 2
        p = np.clip(p, 1e-12, 1 - 1e-12)
        return (goods_arr * np.log(p) + (shots - goods_arr) * np.log1p(-p)).sum(axis=1)

    best = int(np.argmax(loglike(thetas)))
    lo = thetas[max(0, best - 1)]
    hi = thetas[min(grid_n - 1, best + 1)]
    for _ in range(80):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        v1, v2 = loglike(np.array([m1, m2]))
        if v1 < v2:
            lo = m1
        else:
            hi = m2
    return 0.5 * (lo + hi)


def _run_amplitude_estimation(
    inst: BitStringInstance,
    spec: PrepSpec,
    plan: AmplificationPlan,
    rng: np.random.Generator,
    ledger: QueryLedger,
) -> float:
    """Median-of-repetitions weight estimate; charges the physical ledger."""
    n = inst.N
    mask = inst.ones_mask
    axis = init_uniform(n)
    scratch = QueryLedger()
    prep_cost = build_preparation_circuit(inst, spec).oracle_cost
    estimates = []
    for _ in range(plan.repetitions):
        state = init_uniform(n)
        applied = 0
        goods = []
        for m in plan.powers:
            for _ in range(m - applied):
                state = _grover_step(state, inst, spec, scratch, axis)
            applied = m
            p_good = float(state.probabilities[mask].sum())
            goods.append(int(rng.binomial(plan.shots_per_round, min(1.0, p_good))))
        theta = _mle_angle(plan.powers, plan.shots_per_round, goods)
        estimates.append(n * math.sin(theta) ** 2)
    reflections = plan.total_reflections
    ledger.record_reflection(reflections)
    ledger.record_oh(reflections * 2 * prep_cost)
    return float(np.median(estimates))


def quantum_estimate_z(
    inst: BitStringInstance,
    epsilon: float,
    confidence: float,
    ledger: QueryLedger,
    *,
    rng: np.random.Generator,
    assumed_weight: Optional[int] = None,
    eta: float = 0.1,
    shots_per_round: int = 24,
) -> EstimateResult:
    """Estimate the one-count of the instance through Gibbs reflections only.

    The instance is touched exclusively through the preparation/reflection
    circuit (plus the free uniform-state reflection, itself the beta = 0
    Gibbs reflection). assumed_weight defaults to the true weight, matching
    the known-weight preparation setting; the distinguishers pass the
    candidate weights instead.
    """
    if inst.weight < 1:
        raise EmptyTarget("cannot estimate a zero-weight instance")
    w_assumed = inst.weight if assumed_weight is None else assumed_weight
    spec = PrepSpec(beta=math.inf, assumed_weight=w_assumed, eta=eta, N=inst.N)
    plan = plan_amplitude_rounds(
        inst.N, w_assumed, epsilon, confidence, shots_per_round
    )
    before = ledger.snapshot()
    estimate = _run_amplitude_estimation(inst, spec, plan, rng, ledger)
    used = ledger.delta(before)
    hit = abs(estimate - inst.weight) <= epsilon * inst.weight
    return EstimateResult(
        estimate=estimate,
        target_epsilon=epsilon,
        oh_queries=used.oh_queries,
        reflections=used.reflections,
        classical_samples=0,
        hit=hit,
    )


def classical_sample_count(epsilon: float, confidence: float, weight_floor: float) -> int:
    """Two-sided Hoeffding size guaranteeing relative error epsilon.

    Conservative variance 1/4; weight_floor is the assumed lower bound on
    the one-density w/N (the paired instances here keep it near 1/2).
    """
    if not 0.0 < epsilon < 1.0:
        raise WeightOutOfRange(f"epsilon {epsilon} outside (0, 1)")
    if not 0.5 < confidence < 1.0:
        raise WeightOutOfRange(f"confidence {confidence} outside (1/2, 1)")
    if not 0.0 < weight_floor <= 1.0:
        raise WeightOutOfRange(f"weight_floor {weight_floor} outside (0, 1]")
    t = epsilon * weight_floor
    return math.ceil(math.log(2.0 / (1.0 - confidence)) / (2.0 * t * t))


def classical_estimate_z(
    inst: BitStringInstance,
    epsilon: float,
    confidence: float,
    rng: np.random.Generator,
    *,
    weight_floor: float = 0.25,
) -> EstimateResult:
    """Uniformly sample sites, query the energy, scale the zero-energy rate."""
    n_samples = classical_sample_count(epsilon, confidence, weight_floor)
    sites = rng.integers(0, inst.N, size=n_samples)
    ones = int(inst.bits[sites].sum())
    estimate = inst.N * ones / n_samples
    hit = (
        inst.weight > 0 and abs(estimate - inst.weight) <= epsilon * inst.weight
    )
    return EstimateResult(
        estimate=float(estimate),
        target_epsilon=epsilon,
        oh_queries=n_samples,
        reflections=0,
        classical_samples=n_samples,
        hit=hit,
    )


BernoulliStream = Callable[[int], np.ndarray]


def make_bernoulli_stream(p: float, rng: np.random.Generator) -> BernoulliStream:
    return lambda k: (rng.random(k) < p).astype(np.uint8)


def biased_coin_distinguish(
    stream: BernoulliStream, delta: float, budget: int
) -> CoinVerdict:
    """Majority vote on `budget` samples; ties resolve to PLUS, deterministically."""
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    if budget < 1:
        raise ZeroBudget(f"need a positive sample budget, got {budget}")
    xs = np.asarray(stream(budget))
    return CoinVerdict.PLUS if xs.mean() >= 0.5 else CoinVerdict.MINUS


def _shrink_to_budget(plan: AmplificationPlan, budget: int) -> AmplificationPlan:
    """Largest sub-plan fitting the reflection budget (repetitions first, then rounds)."""
    per_rep = plan.reflections_per_repetition
    if per_rep <= budget:
        return AmplificationPlan(
            plan.powers,
            plan.shots_per_round,
            max(1, min(plan.repetitions, budget // per_rep)),
        )
    powers = list(plan.powers)
    while len(powers) > 2:
        powers.pop()
        candidate = AmplificationPlan(tuple(powers), plan.shots_per_round, 1)
        if candidate.reflections_per_repetition <= budget:
            return candidate
    return AmplificationPlan(tuple(powers), plan.shots_per_round, 1)


def minimal_sufficient_budget(
    pair: PairedInstance, confidence: float = 2.0 / 3.0, shots_per_round: int = 24
) -> int:
    """Reflections the full distinguishing plan wants at epsilon = delta."""
    plan = plan_amplitude_rounds(
        pair.N, pair.light.weight, pair.delta, confidence, shots_per_round
    )
    return plan.total_reflections


def hamming_distinguish_quantum(
    pair: PairedInstance,
    hidden: WeightVerdict,
    budget: int,
    ledger: QueryLedger,
    *,
    rng: np.random.Generator,
    confidence: float = 2.0 / 3.0,
    eta: float = 0.1,
    shots_per_round: int = 24,
) -> DistinguishResult:
    """Estimate the weight at precision delta and threshold at N/2.

    The preparation assumes the lighter candidate weight so the search floor
    covers both hypotheses. If the plan exceeds the reflection budget it is
    shrunk (repetitions first, then rounds) and budget_sufficed reports False.
    """
    if budget < 1:
        raise ZeroBudget(f"need a positive reflection budget, got {budget}")
    inst = pair.heavy if hidden is WeightVerdict.HEAVY else pair.light
    w_assumed = pair.light.weight
    spec = PrepSpec(beta=math.inf, assumed_weight=w_assumed, eta=eta, N=pair.N)
    plan = plan_amplitude_rounds(
        pair.N, w_assumed, pair.delta, confidence, shots_per_round
    )
    sufficed = plan.total_reflections <= budget
    if not sufficed:
        plan = _shrink_to_budget(plan, budget)
    before = ledger.snapshot()
    estimate = _run_amplitude_estimation(inst, spec, plan, rng, ledger)
    used = ledger.delta(before)
    verdict = (
        WeightVerdict.HEAVY if estimate >= pair.N / 2.0 else WeightVerdict.LIGHT
    )
    return DistinguishResult(verdict, estimate, used.reflections, sufficed)
