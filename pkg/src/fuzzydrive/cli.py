"""Command line front end.

    fuzzydrive run <scenario.yaml> [--out-csv PATH] [--out-plot PATH]
                   [--dt SECONDS] [--seed-check]

Exit codes: 0 success, 2 scenario parse error, 3 validation error,
4 divergence during simulation, 5 I/O error, 1 anything else (including a
failed determinism check).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import (
    DivergenceError,
    FuzzyDriveError,
    ScenarioParseError,
    ScenarioValidationError,
)
from .export import export_csv, export_plot, trace_to_csv
from .scenario import load_scenario
from .sim import run as run_scenario

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzydrive",
        description="Simulate the fuzzy-controlled hybrid drivetrain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one scenario file")
    run_p.add_argument("scenario", help="path to a scenario YAML file")
    run_p.add_argument("--out-csv", metavar="PATH", help="write the trace as CSV")
    run_p.add_argument("--out-plot", metavar="PATH", help="write an SVG speed plot")
    run_p.add_argument(
        "--dt", type=float, metavar="SECONDS", help="override the scenario time step"
    )
    run_p.add_argument(
        "--seed-check",
        action="store_true",
        help="run the scenario twice and verify byte-identical traces",
    )
    return parser


def _cmd_run(args) -> int:
    try:
        spec = load_scenario(args.scenario)
    except ScenarioParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if args.dt is not None:
        spec = replace(spec, dt=args.dt)
    try:
        spec.validate()
        trace = run_scenario(spec)
        if args.seed_check:
            again = run_scenario(spec)
            if trace_to_csv(trace) != trace_to_csv(again):
                print(
                    f"seed-check FAILED: scenario {spec.name!r} is not deterministic",
                    file=sys.stderr,
                )
                return EXIT_ERROR
            print(f"seed-check ok: {spec.name!r} reproduces byte-identical traces")
    except ScenarioValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"error: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE

    if len(trace):
        print(
            f"{spec.name}: {len(trace)} ticks, final omega_arm "
            f"{trace.omega_arm[-1]:.3f} rad/s, engine {trace.omega_engine[-1]:.3f}, "
            f"motor {trace.omega_motor[-1]:.3f}"
        )
    else:
        print(f"{spec.name}: empty trace (zero duration)")

    try:
        if args.out_csv:
            export_csv(trace, args.out_csv)
            print(f"wrote {args.out_csv}")
        if args.out_plot:
            export_plot(trace, args.out_plot, title=spec.name)
            print(f"wrote {args.out_plot}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except FuzzyDriveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
