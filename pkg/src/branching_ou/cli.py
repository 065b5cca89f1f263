"""Command-line entry point.

Subcommands: simulate, lln, clt, wlaw, oracle, variance.  Exit code 0 when
every check passes, 1 on a test failure, 2 on usage or configuration
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    RUNNERS,
    ConfigError,
    ExperimentConfig,
    dump_snapshots,
    emit,
)
from .model import InvalidParameterError
from .simulator import ResourceCapError, simulate_farm

_SUBCOMMANDS = ("simulate", "lln", "clt", "wlaw", "oracle", "variance")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="branching-ou",
        description="Simulation and verification toolkit for U-statistics "
                    "of branching Ornstein-Uhlenbeck particle systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, type=Path,
                         help="path to the JSON experiment config")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--replicas", type=int, default=None,
                         help="override the replica count")
        cmd.add_argument("--t", type=str, default=None,
                         help="override the time grid, comma separated")
        cmd.add_argument("--out", type=Path, default=Path("out"),
                         help="output directory")
        cmd.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker pool size for the replica farm")
    return parser


def _load_config(args) -> ExperimentConfig:
    with open(args.config) as fh:
        raw = json.load(fh)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.replicas is not None:
        raw["replicas"] = args.replicas
    if args.t is not None:
        raw["t_grid"] = [float(v) for v in args.t.split(",")]
    if args.threads is not None:
        raw["threads"] = args.threads
    raw["test"] = args.command
    return ExperimentConfig.from_dict(raw)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        config = _load_config(args)
    except (OSError, json.JSONDecodeError, ConfigError,
            InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "simulate":
            farm = simulate_farm(
                config.params, config.t_grid, config.replicas, config.seed,
                caps=config.caps, batch_size=config.batch_size,
                threads=config.threads,
            )
            path = dump_snapshots(farm, config.t_grid, args.out)
            counts = [sum(1 for s in farm[-1] if s.count > 0), config.replicas]
            print(f"wrote {path} ({counts[0]}/{counts[1]} replicas surviving "
                  f"at t={config.t_grid[-1]:g})")
            return 0
        runner = RUNNERS[args.command]
        report = runner(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc} (time reached {exc.time_reached:g})",
              file=sys.stderr)
        return 1

    path = emit(report, args.format, args.out)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        target = "" if check.target is None else f" target={check.target:.6g}"
        print(f"[{status}] {check.name}: value={check.value:.6g}{target} "
              f"({check.tolerance})")
    print(f"report: {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
