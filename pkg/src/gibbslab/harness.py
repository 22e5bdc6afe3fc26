"""Experiment driver: verification suites and scaling sweeps.

Each experiment is a pure function of (config, master_seed): trials draw
their randomness from counter-based streams keyed (master_seed, trial_index),
so results are independent of execution order and of the worker count set in
the GIBBSLAB_WORKERS environment variable. Output rows serialize to CSV (one
fixed, versioned schema per row kind) or JSON; files are written atomically.

Exit code contract: 0 all embedded assertions passed, 1 an assertion failed,
2 the configuration was invalid.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import _recheck
from .bounds import (
    BoundReport,
    Side,
    chernoff_tails,
    classical_instance_conditions,
    corollary_bound,
    hamming_query_bound,
    reflection_bound_summary,
    separation_margin,
)
from .errors import ConfigError, DegenerateInput
from .estimators import (
    CoinVerdict,
    biased_coin_distinguish,
    classical_estimate_z,
    make_bernoulli_stream,
    quantum_estimate_z,
)
from .gibbs import (
    PairedInstance,
    build_instance,
    feasible_pair_size,
    gibbs_state_for_instance,
    overlap_wrong_weight_closed,
    wrong_weight_state,
)
from .statevector import QueryLedger, inner_product, trial_rng
from .stateprep import (
    PrepSpec,
    fixed_point_search,
    gibbs_prep_cost,
    minimal_query_count,
)

EXPERIMENTS = (
    "verify-overlap",
    "verify-fixed-point",
    "verify-z",
    "verify-chernoff",
    "sweep-classical",
    "sweep-quantum",
    "bounds-report",
)

WORKERS_ENV = "GIBBSLAB_WORKERS"

SWEEP_COLUMNS = (
    "experiment",
    "seed",
    "N",
    "delta",
    "beta",
    "epsilon",
    "eta",
    "trials",
    "oh_queries",
    "reflections",
    "classical_samples",
    "estimate",
    "relative_error",
    "success_rate",
    "fitted_slope",
)

BOUND_COLUMNS = ("name", "inputs", "value", "side", "feasible")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    master_seed: int = 1
    trials: int = 50
    n_list: tuple = (256,)
    delta_list: tuple = (0.05, 0.1, 0.2)
    beta_list: tuple = (0.0, 0.5, 1.0, 2.0, math.inf)
    epsilon_list: tuple = (0.2, 0.1, 0.05, 0.025)
    eta: float = 0.1
    confidence: float = 2.0 / 3.0
    cap_constant: float = 1.0
    budget_p: float = 0.2
    out: Optional[str] = None
    fmt: str = "csv"

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for name in ("n_list", "delta_list", "beta_list", "epsilon_list"):
            if len(getattr(self, name)) == 0:
                raise ConfigError(f"{name} must be non-empty")
        if any(n < 1 for n in self.n_list):
            raise ConfigError(f"N values must be >= 1, got {self.n_list}")
        if any(not 0.0 < d < 0.5 for d in self.delta_list):
            raise ConfigError(f"all deltas must lie in (0, 1/2), got {self.delta_list}")
        if any(b < 0 for b in self.beta_list):
            raise ConfigError(f"betas must be >= 0, got {self.beta_list}")
        if any(not 0.0 < e < 1.0 for e in self.epsilon_list):
            raise ConfigError(f"epsilons must lie in (0, 1), got {self.epsilon_list}")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta}")
        if not 0.5 < self.confidence < 1.0:
            raise ConfigError(f"confidence must lie in (1/2, 1), got {self.confidence}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")
        if not 0.0 < self.budget_p < 1.0:
            raise ConfigError(f"budget_p must lie in (0, 1), got {self.budget_p}")
        if self.cap_constant <= 0:
            raise ConfigError(f"cap_constant must be > 0, got {self.cap_constant}")


@dataclass(frozen=True)
class SweepResult:
    """One aggregate row of an experiment (grid point or fit summary)."""

    experiment: str
    seed: int
    N: Optional[int] = None
    delta: Optional[float] = None
    beta: Optional[float] = None
    epsilon: Optional[float] = None
    eta: Optional[float] = None
    trials: Optional[int] = None
    oh_queries: Optional[float] = None
    reflections: Optional[float] = None
    classical_samples: Optional[float] = None
    estimate: Optional[float] = None
    relative_error: Optional[float] = None
    success_rate: Optional[float] = None
    fitted_slope: Optional[float] = None

    def __post_init__(self) -> None:
        if self.success_rate is not None and not 0.0 <= self.success_rate <= 1.0:
            raise ConfigError(f"success_rate {self.success_rate} outside [0, 1]")
        for name in ("oh_queries", "reflections", "classical_samples"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"{name} mean must be >= 0, got {v}")

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def fit_loglog_slope(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log y against log x."""
    if len(points) < 3:
        raise DegenerateInput(f"need >= 3 points, got {len(points)}")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if (xs <= 0).any() or (ys <= 0).any():
        raise DegenerateInput("log-log fit needs strictly positive coordinates")
    if np.unique(xs).size != xs.size:
        raise DegenerateInput("abscissae must be distinct")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def _worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV}={env!r} is not an integer") from exc
    return os.cpu_count() or 1


def _map_trials(fn: Callable, argses: list) -> list:
    """Order-preserving map over trials, process-parallel when configured."""
    workers = _worker_count()
    if workers <= 1 or len(argses) <= 1:
        return [fn(a) for a in argses]
    chunk = max(1, len(argses) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, argses, chunksize=chunk))


# --- serialization ------------------------------------------------------------


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if float(value).is_integer() and abs(value) < 1e15:
            return str(int(value))
        return format(value, ".12g")
    return str(value)


def _fmt_inputs(inputs: dict) -> str:
    return ";".join(f"{k}={_fmt_cell(v)}" for k, v in inputs.items())


def rows_to_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    lines = ["# schema=1", f"# generated={time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}"]
    lines.append(",".join(columns))
    for row in rows:
        unknown = set(row) - set(columns)
        if unknown:
            raise ConfigError(f"unknown columns {sorted(unknown)} in result row")
        lines.append(",".join(_fmt_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def rows_to_json(columns: Sequence[str], rows: Sequence[dict]) -> str:
    def clean(v):
        if isinstance(v, float) and math.isinf(v):
            return "inf"
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        return v

    payload = {
        "schema": 1,
        "generated": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "columns": list(columns),
        "rows": [{c: clean(r.get(c)) for c in columns} for r in rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_result_file(path: str, text: str) -> None:
    """Atomic write: temp file in the destination directory, then rename."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".gibbslab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- experiments --------------------------------------------------------------


def _experiment_verify_overlap(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    worst = 0.0
    for delta in config.delta_list:
        n = feasible_pair_size(delta, minimum=max(config.n_list))
        pair = PairedInstance.build(n, delta, seed=config.master_seed)
        for beta in config.beta_list:
            closed = overlap_wrong_weight_closed(delta, beta)
            truth = gibbs_state_for_instance(pair.light, beta)
            prepared = wrong_weight_state(pair.light, pair.heavy.weight, beta)
            explicit = abs(inner_product(truth, prepared))
            # symmetric direction must give the identical value
            truth2 = gibbs_state_for_instance(pair.heavy, beta)
            prepared2 = wrong_weight_state(pair.heavy, pair.light.weight, beta)
            explicit2 = abs(inner_product(truth2, prepared2))
            diff = max(abs(closed - explicit), abs(closed - explicit2))
            worst = max(worst, diff)
            rows.append(
                SweepResult(
                    experiment=config.experiment,
                    seed=config.master_seed,
                    N=n,
                    delta=delta,
                    beta=beta,
                    estimate=closed,
                    relative_error=diff,
                    success_rate=1.0 if diff <= 1e-12 else 0.0,
                ).as_dict()
            )
        beta0 = overlap_wrong_weight_closed(delta, 0.0)
        if abs(beta0 - math.sqrt(1.0 - 4.0 * delta * delta)) > 1e-12:
            ok = False
            messages.append(f"beta=0 endpoint mismatch at delta={delta}")
        if overlap_wrong_weight_closed(delta, math.inf) != 1.0:
            ok = False
            messages.append(f"beta=inf endpoint differs from 1 at delta={delta}")
    if worst > 1e-12:
        ok = False
        messages.append(f"closed form vs explicit inner product: max diff {worst:.3e}")
    else:
        messages.append(f"overlap closed form agrees with explicit states (max diff {worst:.3e})")
    return rows, ok, messages


def _experiment_verify_fixed_point(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    lambda_lower = 0.25
    c_fit = 0.0
    for n in config.n_list:
        eta = config.eta
        L = minimal_query_count(lambda_lower, eta)
        c_fit = max(c_fit, L * math.sqrt(lambda_lower) / math.log(2.0 / eta))
        floor = 1.0 - eta * eta
        worst = 1.0
        for count in range(math.ceil(n * lambda_lower), n + 1):
            ledger = QueryLedger()
            state = fixed_point_search(
                np.arange(n) < count, n, lambda_lower, eta, ledger
            )
            amp = state.amplitudes[:count].sum() / math.sqrt(count)
            success = abs(amp) ** 2
            worst = min(worst, success)
            if ledger.oh_queries != L:
                ok = False
                messages.append(f"query count {ledger.oh_queries} != scheduled L={L}")
        if worst < floor:
            ok = False
            messages.append(f"floor violated at N={n}: {worst:.6f} < {floor:.6f}")
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                N=n,
                eta=eta,
                oh_queries=float(L),
                estimate=worst,
                success_rate=1.0 if worst >= floor else 0.0,
            ).as_dict()
        )
    rows.append(
        SweepResult(
            experiment=config.experiment,
            seed=config.master_seed,
            eta=config.eta,
            fitted_slope=c_fit,
        ).as_dict()
    )
    messages.append(f"query envelope constant C = {c_fit:.3f} at lambda_lower={lambda_lower}")
    return rows, ok, messages


def _quantum_trial(args) -> tuple:
    (seed, trial, n, w, eps, confidence, eta) = args
    inst = build_instance(n, weight=w, seed=seed)
    ledger = QueryLedger()
    result = quantum_estimate_z(
        inst, eps, confidence, ledger, rng=trial_rng(seed, trial), eta=eta
    )
    prep = gibbs_prep_cost(inst, PrepSpec(math.inf, w, eta, n))
    ledger_exact = (
        ledger.oh_queries == 2 * prep * ledger.reflections
        and ledger.ob_queries == ledger.oh_queries
    )
    return (result.estimate, result.hit, result.reflections, result.oh_queries, ledger_exact)


def _classical_trial(args) -> tuple:
    (seed, trial, n, w, eps, confidence) = args
    inst = build_instance(n, weight=w, seed=seed)
    result = classical_estimate_z(inst, eps, confidence, trial_rng(seed, trial))
    return (result.estimate, result.hit, result.classical_samples)


def _experiment_verify_z(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    for n in config.n_list:
        w = n // 2
        for eps in config.epsilon_list:
            q_args = [
                (config.master_seed, t, n, w, eps, config.confidence, config.eta)
                for t in range(config.trials)
            ]
            q = _map_trials(_quantum_trial, q_args)
            hits = sum(r[1] for r in q) / len(q)
            if not all(r[4] for r in q):
                ok = False
                messages.append(f"ledger exactness violated at N={n}, eps={eps}")
            if hits < config.confidence:
                ok = False
                messages.append(
                    f"quantum hit rate {hits:.3f} < confidence at N={n}, eps={eps}"
                )
            mean_refl = float(np.mean([r[2] for r in q]))
            cap = config.cap_constant * math.log(n) ** 2 / eps
            messages.append(
                f"N={n} eps={eps}: reflections {mean_refl:.0f} vs class cap "
                f"{cap:.0f} (c={config.cap_constant}): "
                f"{'within' if mean_refl <= cap else 'exceeds'} (reported, not asserted)"
            )
            rows.append(
                SweepResult(
                    experiment=config.experiment,
                    seed=config.master_seed,
                    N=n,
                    epsilon=eps,
                    eta=config.eta,
                    trials=config.trials,
                    oh_queries=float(np.mean([r[3] for r in q])),
                    reflections=mean_refl,
                    classical_samples=0.0,
                    estimate=float(np.mean([r[0] for r in q])),
                    relative_error=float(np.mean([abs(r[0] - w) / w for r in q])),
                    success_rate=hits,
                ).as_dict()
            )
            c_args = [
                (config.master_seed, 10**6 + t, n, w, eps, config.confidence)
                for t in range(config.trials)
            ]
            c = _map_trials(_classical_trial, c_args)
            c_hits = sum(r[1] for r in c) / len(c)
            if c_hits < config.confidence:
                ok = False
                messages.append(
                    f"classical hit rate {c_hits:.3f} < confidence at N={n}, eps={eps}"
                )
            rows.append(
                SweepResult(
                    experiment=config.experiment,
                    seed=config.master_seed,
                    N=n,
                    epsilon=eps,
                    trials=config.trials,
                    oh_queries=float(np.mean([r[2] for r in c])),
                    reflections=0.0,
                    classical_samples=float(np.mean([r[2] for r in c])),
                    estimate=float(np.mean([r[0] for r in c])),
                    relative_error=float(np.mean([abs(r[0] - w) / w for r in c])),
                    success_rate=c_hits,
                ).as_dict()
            )
    return rows, ok, messages


def _experiment_verify_chernoff(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    for i, delta in enumerate(config.delta_list):
        report = classical_instance_conditions(delta)
        n_min = int(report.value)
        tau1, tau2 = report.inputs["tau1"], report.inputs["tau2"]
        rng = trial_rng(config.master_seed, i)
        heavy = rng.binomial(n_min, 0.5 + delta, size=config.trials)
        light = rng.binomial(n_min, 0.5 - delta, size=config.trials)
        fail1 = float(np.mean(heavy < tau1))
        fail2 = float(np.mean(light > tau2))
        analytic_ok = report.feasible
        empirical_ok = fail1 <= 0.02 and fail2 <= 0.02
        if not (analytic_ok and empirical_ok):
            ok = False
            messages.append(
                f"delta={delta}: analytic_ok={analytic_ok} empirical=({fail1:.4f},{fail2:.4f})"
            )
        messages.append(
            f"delta={delta}: N_min={n_min} exact tails=({report.inputs['exact_fail_1']:.2e},"
            f"{report.inputs['exact_fail_2']:.2e}) chernoff=({report.inputs['chernoff_fail_1']:.2e},"
            f"{report.inputs['chernoff_fail_2']:.2e}) MC failures=({fail1:.4f},{fail2:.4f})"
        )
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                N=n_min,
                delta=delta,
                trials=config.trials,
                estimate=float(n_min),
                relative_error=max(fail1, fail2),
                success_rate=1.0 if (analytic_ok and empirical_ok) else 0.0,
            ).as_dict()
        )
    return rows, ok, messages


def _coin_correctness(
    delta: float, budget: int, trials: int, seed: int, salt: int
) -> float:
    correct = 0
    for t in range(trials):
        rng = trial_rng(seed, salt + t)
        plus = t % 2 == 0
        stream = make_bernoulli_stream(0.5 + (delta if plus else -delta), rng)
        verdict = biased_coin_distinguish(stream, delta, budget)
        correct += verdict is (CoinVerdict.PLUS if plus else CoinVerdict.MINUS)
    return correct / trials


def minimal_coin_budget(
    delta: float, trials: int, seed: int, salt: int = 0, target: float = 0.9
) -> int:
    """Smallest budget whose measured correctness reaches the target."""
    hi = 4
    while _coin_correctness(delta, hi, trials, seed, salt + hi) < target:
        hi *= 2
        if hi > 10**7:
            raise DegenerateInput(f"no sufficient coin budget below 1e7 for delta={delta}")
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _coin_correctness(delta, mid, trials, seed, salt + mid) >= target:
            hi = mid
        else:
            lo = mid + 1
    return hi


def _experiment_sweep_classical(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    budgets = []
    for i, delta in enumerate(sorted(config.delta_list, reverse=True)):
        budget = minimal_coin_budget(
            delta, config.trials, config.master_seed, salt=10**7 * (i + 1)
        )
        budgets.append((1.0 / delta, float(budget)))
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                delta=delta,
                trials=config.trials,
                classical_samples=float(budget),
                success_rate=0.9,
            ).as_dict()
        )
    if len(budgets) >= 3:
        slope = fit_loglog_slope(budgets)
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                trials=config.trials,
                fitted_slope=slope,
            ).as_dict()
        )
        if not 1.7 <= slope <= 2.3:
            ok = False
            messages.append(f"classical budget slope {slope:.3f} outside [1.7, 2.3]")
        else:
            messages.append(f"classical budget slope {slope:.3f} within [1.7, 2.3]")
    else:
        messages.append("fewer than 3 deltas: slope fit skipped")
    return rows, ok, messages


def _experiment_sweep_quantum(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    n = config.n_list[0]
    w = n // 2
    points = []
    for eps in config.epsilon_list:
        args = [
            (config.master_seed, t, n, w, eps, config.confidence, config.eta)
            for t in range(config.trials)
        ]
        results = _map_trials(_quantum_trial, args)
        hits = sum(r[1] for r in results) / len(results)
        mean_refl = float(np.mean([r[2] for r in results]))
        if not all(r[4] for r in results):
            ok = False
            messages.append(f"ledger exactness violated at eps={eps}")
        if hits < config.confidence:
            ok = False
            messages.append(f"hit rate {hits:.3f} < confidence at eps={eps}")
        points.append((1.0 / eps, mean_refl))
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                N=n,
                epsilon=eps,
                eta=config.eta,
                trials=config.trials,
                oh_queries=float(np.mean([r[3] for r in results])),
                reflections=mean_refl,
                estimate=float(np.mean([r[0] for r in results])),
                relative_error=float(np.mean([abs(r[0] - w) / w for r in results])),
                success_rate=hits,
            ).as_dict()
        )
    if len(points) >= 3:
        slope = fit_loglog_slope(points)
        rows.append(
            SweepResult(
                experiment=config.experiment,
                seed=config.master_seed,
                N=n,
                trials=config.trials,
                fitted_slope=slope,
            ).as_dict()
        )
        if not 0.7 <= slope <= 1.3:
            ok = False
            messages.append(f"reflection slope {slope:.3f} outside [0.7, 1.3]")
        else:
            messages.append(f"reflection slope {slope:.3f} within [0.7, 1.3]")
    else:
        messages.append("fewer than 3 epsilons: slope fit skipped")
    return rows, ok, messages


def _bound_row(report: BoundReport) -> dict:
    return {
        "name": report.name,
        "inputs": _fmt_inputs(report.inputs),
        "value": report.value,
        "side": report.side.value,
        "feasible": report.feasible,
    }


def _experiment_bounds_report(config: ExperimentConfig):
    rows, messages, ok = [], [], True
    worst = 0.0

    def close(a: float, b: float) -> float:
        return abs(a - b) / max(1e-300, abs(b))

    for n, l, lp in ((100, 40, 60), (100, 0, 100), (100, 49, 51), (4096, 1000, 3000)):
        value = hamming_query_bound(n, l, lp)
        worst = max(worst, close(value, _recheck.hamming_query_bound_alt(n, l, lp)))
        rows.append(
            _bound_row(
                BoundReport(
                    "hamming-weight-queries",
                    {"N": n, "l": l, "lp": lp},
                    value,
                    Side.LOWER,
                )
            )
        )
    for delta in config.delta_list:
        n = feasible_pair_size(delta, minimum=max(config.n_list))
        value = corollary_bound(n, delta)
        worst = max(worst, close(value, _recheck.corollary_bound_alt(delta)))
        rows.append(
            _bound_row(
                BoundReport(
                    "paired-weight-queries",
                    {"N": n, "delta": delta, "ratio_to_inv_delta": value * delta},
                    value,
                    Side.LOWER,
                    feasible=0.125 <= value * delta <= 8.0,
                )
            )
        )
        margin = separation_margin(n, delta)
        worst = max(worst, close(margin, _recheck.separation_margin_alt(delta)))
        if margin < delta:
            ok = False
            messages.append(f"separation margin {margin} below delta {delta}")
        rows.append(
            _bound_row(
                BoundReport(
                    "separation-margin",
                    {"N": n, "delta": delta},
                    margin,
                    Side.LOWER,
                    feasible=margin >= delta,
                )
            )
        )
        report = classical_instance_conditions(delta)
        alt = _recheck.instance_thresholds_alt(delta)
        worst = max(
            worst,
            close(report.inputs["tau1"], alt[1]),
            close(report.inputs["tau2"], alt[2]),
            close(report.inputs["implied_epsilon"], alt[3]),
        )
        if not report.feasible:
            ok = False
            messages.append(f"instance conditions infeasible at delta={delta}")
        rows.append(_bound_row(report))
        mu = report.inputs["n_min"] * (0.5 + delta)
        lower, upper = chernoff_tails(mu, delta)
        alt_tails = _recheck.chernoff_tails_alt(mu, delta)
        worst = max(worst, close(lower, alt_tails[0]), close(upper, alt_tails[1]))
        rows.append(
            _bound_row(
                BoundReport(
                    "chernoff-tails",
                    {"mu": mu, "t": delta, "lower": lower, "upper": upper},
                    lower,
                    Side.UPPER,
                )
            )
        )
        pair_n = feasible_pair_size(delta, minimum=max(config.n_list))
        inst = build_instance(pair_n, weight=round(pair_n * (0.5 - delta)),
                              seed=config.master_seed)
        prep = gibbs_prep_cost(
            inst, PrepSpec(math.inf, inst.weight, config.eta, pair_n)
        )
        summary = reflection_bound_summary(
            pair_n, delta, float(prep), p=config.budget_p, c=config.cap_constant
        )
        worst = max(worst, close(summary.value, _recheck.reflection_bound_alt(delta)))
        window_alt = _recheck.budget_window_ok_alt(
            pair_n, delta, config.budget_p, config.cap_constant
        )
        if bool(summary.feasible) != window_alt:
            ok = False
            messages.append(f"budget window paths disagree at delta={delta}")
        rows.append(_bound_row(summary))
    if worst > 1e-12:
        ok = False
        messages.append(f"independent re-derivations disagree: {worst:.3e}")
    else:
        messages.append(f"all bound expressions match re-derivations (worst {worst:.3e})")
    return rows, ok, messages


_RUNNERS = {
    "verify-overlap": (_experiment_verify_overlap, SWEEP_COLUMNS),
    "verify-fixed-point": (_experiment_verify_fixed_point, SWEEP_COLUMNS),
    "verify-z": (_experiment_verify_z, SWEEP_COLUMNS),
    "verify-chernoff": (_experiment_verify_chernoff, SWEEP_COLUMNS),
    "sweep-classical": (_experiment_sweep_classical, SWEEP_COLUMNS),
    "sweep-quantum": (_experiment_sweep_quantum, SWEEP_COLUMNS),
    "bounds-report": (_experiment_bounds_report, BOUND_COLUMNS),
}


def run_experiment(config: ExperimentConfig):
    """Validate, run, and serialize one experiment.

    Returns (exit_code, rows, messages); the result file, when configured, is
    written atomically before returning.
    """
    try:
        config.validate()
    except ConfigError as exc:
        return 2, [], [f"config error: {exc}"]
    runner, columns = _RUNNERS[config.experiment]
    rows, ok, messages = runner(config)
    text = (
        rows_to_csv(columns, rows) if config.fmt == "csv" else rows_to_json(columns, rows)
    )
    if config.out:
        write_result_file(config.out, text)
    return (0 if ok else 1), rows, messages


def run(config: ExperimentConfig) -> int:
    """CLI-facing wrapper: prints messages, returns the exit status."""
    code, rows, messages = run_experiment(config)
    for message in messages:
        print(message)
    if config.out:
        print(f"wrote {len(rows)} rows to {config.out} ({config.fmt})")
    else:
        columns = _RUNNERS[config.experiment][1] if config.experiment in _RUNNERS else SWEEP_COLUMNS
        print(rows_to_csv(columns, rows), end="")
    return code
