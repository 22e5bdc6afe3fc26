"""Closed-form bound expressions and feasibility conditions.

Asymptotic expressions are reported with implied constants set to 1; nothing
here asserts equality against measured costs, only ratio windows do that in
the tests. Every formula has an independently written twin in _recheck.py
and the pair must agree to 1e-12 relative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from scipy import stats

from .errors import BadRange, DeltaOutOfRange, InfeasiblePair


class Side(Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound expression or feasibility condition."""

    name: str
    inputs: dict = field(repr=False)
    value: float
    side: Side
    feasible: Optional[bool] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0):
            raise BadRange(f"bound value must be finite and nonnegative, got {self.value}")


def hamming_query_bound(N: int, l: int, lp: int) -> float:
    """sqrt(N/Delta) + sqrt(m(N-m))/Delta for the weight-promise problem.

    Delta = lp - l and m is whichever promised weight maximizes |N/2 - m|;
    ties resolve to lp (value-neutral, since m(N-m) then coincides).
    """
    if not (N >= 1 and 0 <= l < lp <= N):
        raise BadRange(f"need 0 <= l < lp <= N, got N={N}, l={l}, lp={lp}")
    delta_w = lp - l
    m = lp if abs(N / 2 - lp) >= abs(N / 2 - l) else l
    return math.sqrt(N / delta_w) + math.sqrt(m * (N - m)) / delta_w


def corollary_bound(N: int, delta: float) -> float:
    """The weight-promise bound at the paired weights N(1/2 +- delta).

    Scales as 1/delta; the ratio to 1/delta is checked to sit inside the
    fixed window [1/8, 8] before returning.
    """
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    lo = N * (0.5 - delta)
    hi = N * (0.5 + delta)
    if abs(lo - round(lo)) > 1e-9 or abs(hi - round(hi)) > 1e-9:
        raise InfeasiblePair(f"N(1/2 +- delta) not integers for N={N}, delta={delta}")
    if 2 * N * delta < 1 - 1e-12:
        raise InfeasiblePair(f"need 2*N*delta >= 1, got {2 * N * delta}")
    value = hamming_query_bound(N, round(lo), round(hi))
    ratio = value * delta
    if not 0.125 <= ratio <= 8.0:
        raise BadRange(f"bound/(1/delta) ratio {ratio} escaped [1/8, 8]")
    return value


def separation_margin(N: int, delta: float) -> float:
    """Half the relative weight gap of the paired instances: delta/(1/2+delta).

    Always at least delta for delta < 1/2, which is why estimating to
    relative precision delta distinguishes the pair.
    """
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    if N < 1:
        raise BadRange(f"need N >= 1, got {N}")
    return 0.5 * (2 * N * delta) / (N * (0.5 + delta))


def chernoff_tails(mu: float, t: float) -> tuple[float, float]:
    """Multiplicative Chernoff bounds: (e^{-t^2 mu/2}, e^{-t^2 mu/(2+t)}).

    First bounds the lower tail P[S <= (1-t)mu], second the upper tail
    P[S >= (1+t)mu], for sums of independent 0/1 variables with mean mu.
    """
    if not (mu > 0 and 0.0 < t < 1.0):
        raise BadRange(f"need mu > 0 and t in (0,1), got mu={mu}, t={t}")
    return math.exp(-t * t * mu / 2.0), math.exp(-t * t * mu / (2.0 + t))


def classical_instance_conditions(delta: float) -> BoundReport:
    """Instance-size rule N >= 20/delta^2 and its two 0.99 weight conditions.

    With bits drawn Bernoulli(1/2 + delta) the weight exceeds
    tau1 = N(1/2 + delta/2 - delta^2) with probability >= 0.99, and with
    Bernoulli(1/2 - delta) it stays below tau2 = N(1/2 - delta/2 - delta^2)
    with probability >= 0.99. Both tail requirements correspond to t = delta
    in the Chernoff bounds. The lower-tail Chernoff value already certifies
    the first condition at N = ceil(20/delta^2); the upper-tail constant
    (2+t) is too weak to certify the second at that size, so feasibility is
    judged on the exact binomial tails (the Chernoff values are reported
    alongside for reference).
    """
    if not 0.0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta {delta} outside (0, 1/2)")
    n_min = math.ceil(20.0 / delta**2)
    tau1 = n_min * (0.5 + delta / 2 - delta**2)
    tau2 = n_min * (0.5 - delta / 2 - delta**2)
    implied_epsilon = (tau1 - tau2) / tau1
    mu1 = n_min * (0.5 + delta)
    mu2 = n_min * (0.5 - delta)
    chernoff_low, _ = chernoff_tails(mu1, delta)
    _, chernoff_up = chernoff_tails(mu2, delta)
    # failure events: weight < tau1 under the heavy coin, weight > tau2 under
    # the light coin; exact binomial tails with the strict/loose edges right
    exact_fail_1 = float(stats.binom.cdf(math.ceil(tau1) - 1, n_min, 0.5 + delta))
    exact_fail_2 = float(stats.binom.sf(math.floor(tau2), n_min, 0.5 - delta))
    feasible = exact_fail_1 <= 0.01 and exact_fail_2 <= 0.01
    return BoundReport(
        name="classical-instance-conditions",
        inputs={
            "delta": delta,
            "n_min": n_min,
            "tau1": tau1,
            "tau2": tau2,
            "implied_epsilon": implied_epsilon,
            "chernoff_fail_1": chernoff_low,
            "chernoff_fail_2": chernoff_up,
            "exact_fail_1": exact_fail_1,
            "exact_fail_2": exact_fail_2,
        },
        value=float(n_min),
        side=Side.LOWER,
        feasible=feasible,
    )


def budget_window_ok(N: int, delta: float, p: float, c: float) -> bool:
    """1/(2N) <= delta <= p/(c log^2 N): the regime where the reduction runs."""
    if N < 2 or not 0 < p < 1 or c <= 0:
        raise BadRange(f"need N >= 2, p in (0,1), c > 0; got N={N}, p={p}, c={c}")
    log2n = math.log(N) ** 2
    return 1.0 / (2.0 * N) <= delta <= p / (c * log2n)


def reflection_bound_summary(
    N: int, delta: float, measured_prep_cost: float, *, p: float = 0.2, c: float = 1.0
) -> BoundReport:
    """Reflection lower bound: queries needed over queries per reflection.

    Formula value (1/delta) * sqrt(w/N) with w = N(1/2 - delta), reported
    with unit constants, alongside the simplified form 1/eps - sqrt(1/eps)
    at eps = delta and the empirical ratio against the measured preparation
    cost. feasible reports the budget-window check for (p, c).
    """
    if not (N >= 2 and 0.0 < delta < 0.5 and measured_prep_cost > 0):
        raise BadRange(
            f"need N >= 2, delta in (0,1/2), positive prep cost; "
            f"got N={N}, delta={delta}, cost={measured_prep_cost}"
        )
    w = N * (0.5 - delta)
    formula = (1.0 / delta) * math.sqrt(w / N)
    simplified = 1.0 / delta - math.sqrt(1.0 / delta)
    empirical = (1.0 / delta) / measured_prep_cost
    return BoundReport(
        name="reflection-lower-bound",
        inputs={
            "N": N,
            "delta": delta,
            "light_weight": w,
            "simplified": simplified,
            "measured_prep_cost": measured_prep_cost,
            "empirical_ratio": empirical,
            "budget_p": p,
            "cap_constant": c,
        },
        value=formula,
        side=Side.LOWER,
        feasible=budget_window_ok(N, delta, p, c),
    )
