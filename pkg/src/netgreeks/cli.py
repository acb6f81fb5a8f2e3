"""Command-line entry point.

    netgreeks <subcommand> --config FILE [--seed N] [--draws N] [--out PATH] [--threads N]

Subcommands: symmetric-grid, two-firm, er-sweep, price, greeks,
local-compare, validate.  The config file is JSON; command-line flags
override the matching config fields.  Exit codes: 0 success, 1 failed
validation checks, 2 configuration error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import KINDS, ConfigError, ExperimentConfig, run_experiment
from .fixpoint import ConvergenceError
from .netgen import SinkhornError
from .sensitivity import SensitivityError

__all__ = ["main"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netgreeks",
        description="Valuation and network Greeks for firms with cross-holdings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--draws", type=int, default=None, help="override config draws")
        p.add_argument("--out", default=None, help="override config output path")
        p.add_argument("--threads", type=int, default=None, help="worker threads")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.from_json(args.config, kind=args.command)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.draws is not None:
            cfg.draws = args.draws
        if args.threads is not None:
            cfg.threads = args.threads
        out = args.out if args.out is not None else cfg.out
        if out is None and cfg.kind != "validate":
            raise ConfigError("no output path: set 'out' in the config or pass --out")
        result = run_experiment(cfg, out=out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, SensitivityError, SinkhornError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    if cfg.kind == "validate":
        return 0 if result else 1
    if out is not None:
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
