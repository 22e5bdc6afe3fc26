"""Independent re-derivations of the bound arithmetic.

Deliberately written against different algebraic forms than bounds.py (for
example m(N-m) = N^2/4 - (m - N/2)^2, and the fully simplified corollary
expression) so a transcription slip in either file shows up as disagreement.
Only the tests import this module.
"""

from __future__ import annotations

import math


def hamming_query_bound_alt(N: int, l: int, lp: int) -> float:
    gap = lp - l
    first = math.sqrt(N * gap) / gap
    # pick the promised weight farther from N/2, preferring lp on ties
    m = lp if (N - 2 * lp) ** 2 >= (N - 2 * l) ** 2 else l
    radicand = N * N / 4.0 - (m - N / 2.0) ** 2
    return first + math.sqrt(radicand) / gap


def corollary_bound_alt(delta: float) -> float:
    # sqrt(N/(2N delta)) + sqrt(N^2 (1/4 - delta^2)) / (2 N delta), simplified
    return math.sqrt(1.0 / (2.0 * delta)) + math.sqrt(0.25 - delta * delta) / (
        2.0 * delta
    )


def separation_margin_alt(delta: float) -> float:
    return 2.0 * delta / (1.0 + 2.0 * delta)


def chernoff_tails_alt(mu: float, t: float) -> tuple[float, float]:
    lower = math.e ** (-(t * t) * mu * 0.5)
    upper = math.e ** (-(t * t) * mu / (t + 2.0))
    return lower, upper


def instance_thresholds_alt(delta: float) -> tuple[int, float, float, float]:
    """(n_min, tau1, tau2, implied_epsilon) via the product forms."""
    n_min = math.ceil(20.0 / (delta * delta))
    tau1 = (1.0 - delta) * (0.5 + delta) * n_min
    tau2 = (1.0 + delta) * (0.5 - delta) * n_min
    implied = n_min * delta / tau1
    return n_min, tau1, tau2, implied


def reflection_bound_alt(delta: float) -> float:
    return math.sqrt(0.5 - delta) / delta


def budget_window_ok_alt(N: int, delta: float, p: float, c: float) -> bool:
    return 2.0 * N * delta >= 1.0 and delta * c * math.log(N) ** 2 <= p
