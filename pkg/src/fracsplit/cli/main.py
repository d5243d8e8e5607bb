"""Entry point of the ``fracsplit`` command.

Exit status: 0 on success, 2 for an invalid configuration, 1 for a solver error.
"""

from __future__ import annotations

import argparse
import sys

from ..core.problem import ModelViolation
from ..solvers.trace import ThetaBacktrackExhausted
from .config import EXPERIMENTS, ConfigError, load_config, validate_config
from .experiments import run_experiment

__all__ = ["main", "build_parser"]


def build_parser():
    parser = argparse.ArgumentParser(prog="fracsplit", description="Fractional splitting solvers and experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment described by a JSON config")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (overrides the config)")
    run.add_argument("--seed", type=int, help="run a single trial with this seed")
    run.add_argument("--threads", type=int, default=1, help="worker processes for independent trials")
    run.add_argument("--quiet", action="store_true", help="suppress progress lines")
    val = sub.add_parser("validate", help="check a config file and print all diagnostics")
    val.add_argument("config")
    sub.add_parser("list-experiments", help="print the available experiments")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list-experiments":
        for name, desc in EXPERIMENTS.items():
            print(f"{name:16s} {desc}")
        return 0
    if args.command == "validate":
        try:
            diags = validate_config(args.config)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        if diags:
            return 2
        print(f"{args.config}: ok")
        return 0
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config, seed=args.seed, output=args.out)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_experiment(cfg, quiet=args.quiet, threads=args.threads)
    except (ThetaBacktrackExhausted, ModelViolation, FloatingPointError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
