"""Command-line driver for the verification suites and scaling sweeps.

One subcommand per experiment. Exit codes: 0 all embedded assertions passed,
1 an assertion failed, 2 invalid configuration. beta = infinity is spelled
"inf" on the command line and in result files. Worker-count parallelism is
controlled by the GIBBSLAB_WORKERS environment variable (default: all cores);
results do not depend on the worker count.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from .errors import ConfigError
from .harness import EXPERIMENTS, ExperimentConfig, run


def _parse_beta(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"beta must be >= 0 or 'inf', got {text}")
    return value


_DEFAULTS = {
    "verify-overlap": dict(delta=[0.05, 0.1, 0.2], beta=[0.0, 0.5, 1.0, 2.0, math.inf],
                           n=[400], trials=1),
    "verify-fixed-point": dict(n=[16, 64, 256], trials=1, eta=0.1),
    "verify-z": dict(n=[64], epsilon=[0.1], trials=50),
    "verify-chernoff": dict(delta=[0.1], trials=10000),
    "sweep-classical": dict(delta=[0.2, 0.1, 0.05, 0.025], trials=2000),
    "sweep-quantum": dict(n=[256], epsilon=[0.2, 0.1, 0.05, 0.025], trials=200),
    "bounds-report": dict(delta=[0.25, 0.1, 0.05, 0.02], n=[100], trials=1),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gibbslab",
        description="Verification suites and scaling sweeps for reflection-counted "
        "partition-function estimation.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        defaults = _DEFAULTS[name]
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--seed", type=int, default=1, help="master seed (64-bit)")
        p.add_argument("--trials", type=int, default=defaults.get("trials", 50))
        p.add_argument("--n", type=int, nargs="+", default=defaults.get("n", [256]),
                       help="domain sizes N")
        p.add_argument("--delta", type=float, nargs="+",
                       default=defaults.get("delta", [0.05, 0.1, 0.2]))
        p.add_argument("--beta", type=_parse_beta, nargs="+",
                       default=defaults.get("beta", [0.0, 0.5, 1.0, 2.0, math.inf]),
                       help="inverse temperatures; 'inf' allowed")
        p.add_argument("--epsilon", type=float, nargs="+",
                       default=defaults.get("epsilon", [0.2, 0.1, 0.05, 0.025]))
        p.add_argument("--eta", type=float, default=defaults.get("eta", 0.1))
        p.add_argument("--confidence", type=float, default=2.0 / 3.0)
        p.add_argument("--cap-constant", type=float, default=1.0,
                       help="constant c in the reflection-count cap c*log^2(N)/eps")
        p.add_argument("--budget-p", type=float, default=0.2,
                       help="failure budget p for the window check")
        p.add_argument("--out", type=str, default=None, help="result file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=args.experiment,
        master_seed=args.seed,
        trials=args.trials,
        n_list=tuple(args.n),
        delta_list=tuple(args.delta),
        beta_list=tuple(args.beta),
        epsilon_list=tuple(args.epsilon),
        eta=args.eta,
        confidence=args.confidence,
        cap_constant=args.cap_constant,
        budget_p=args.budget_p,
        out=args.out,
        fmt=args.format,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = run(config_from_args(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
