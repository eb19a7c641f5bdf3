"""Command-line interface.

Subcommands: spectrum, phase, delay, sweep, steady-state, validate.
Exit codes: 0 success, 1 usage or parse error, 2 physics-domain error
(e.g. static instability), 3 validation failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .config import SweepSpec, parse_config_file
from .errors import ConfigError, SimulationError
from .steady import solve_steady_state
from .sweep import emit_csv, render_table, run_sweep
from .validate import DEFAULT_SEED, run_validation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PHYSICS = 2
EXIT_VALIDATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    pass


def _add_common(sub):
    sub.add_argument("--config", required=True, help="configuration file path")
    sub.add_argument("--out", default=None, help="output file (default: stdout)")
    sub.add_argument("--format", choices=("csv", "gnuplot"), default="csv")
    sub.add_argument(
        "--convention",
        choices=("paper-corrected", "intracavity"),
        default=None,
        help="override the transmission convention from the config",
    )
    sub.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sub.add_argument(
        "--no-timestamp", action="store_true", help="suppress the timestamp header line"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oemsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"oemsim {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "phase", "delay", "sweep"):
        sub = subs.add_parser(name, help=f"run a {name} scan")
        _add_common(sub)
    steady = subs.add_parser("steady-state", help="solve and print the operating point")
    steady.add_argument("--config", required=True)
    steady.add_argument("--out", default=None)
    validate = subs.add_parser("validate", help="run the oracle cross-validation suite")
    validate.add_argument("--out", default=None, help="write the JSON report here")
    validate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    validate.add_argument("--jobs", type=int, default=1)
    return parser


def _resolve_scenario(command: str, sweep: SweepSpec | None) -> SweepSpec:
    if command == "sweep":
        if sweep is None:
            raise ConfigError("the sweep subcommand needs a [sweep] section with a scenario")
        return sweep
    if command in ("spectrum", "phase"):
        if sweep is None:
            return SweepSpec(scenario=command)
        return replace(sweep, scenario=command)
    if command == "delay":
        if sweep is None or not sweep.axes:
            raise ConfigError("delay needs a [sweep] axis: P_l, Omega_l or kappa")
        axis = sweep.axes[0].name
        scenario = "delay-vs-power" if axis in ("P_l", "Omega_l") else "delay-vs-kappa"
        return replace(sweep, scenario=scenario)
    raise ConfigError(f"unhandled command {command!r}")  # pragma: no cover


def _run_table_command(args) -> int:
    params, sweep = parse_config_file(args.config)
    spec = _resolve_scenario(args.command, sweep)
    if spec.scenario == "validate":
        return _run_validate_from_spec(args)
    if args.convention:
        spec = replace(spec, convention=args.convention)
    result = run_sweep(params, spec, jobs=args.jobs)
    if args.out is None:
        sys.stdout.write(render_table(result, fmt=args.format, timestamp=not args.no_timestamp))
    else:
        emit_csv(result, args.out, fmt=args.format, timestamp=not args.no_timestamp)
    return EXIT_OK


def _run_validate_from_spec(args) -> int:
    report = run_validation()
    return _finish_validation(report, getattr(args, "out", None))


def _finish_validation(report, out_path) -> int:
    for line in report.summary_lines():
        print(line)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    else:
        sys.stdout.write(report.to_json())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _run_steady_state(args) -> int:
    params, _ = parse_config_file(args.config)
    op = solve_steady_state(params)
    lines = [
        f"q1s = {op.q1s:.17g}",
        f"q2s = {op.q2s:.17g}",
        f"re_cs = {op.cs.real:.17g}",
        f"im_cs = {op.cs.imag:.17g}",
        f"photon_number = {op.photon_number:.17g}",
        f"delta_eff = {op.delta_eff:.17g}",
        f"delta_c = {op.delta_c:.17g}",
        f"branch_count = {op.branch_count}",
        f"residual = {op.residual:.17g}",
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit2 as exc:
        print(f"oemsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --version / --help
        return int(exc.code or 0)
    try:
        if args.command == "validate":
            report = run_validation(seed=args.seed)
            return _finish_validation(report, args.out)
        if args.command == "steady-state":
            return _run_steady_state(args)
        return _run_table_command(args)
    except ConfigError as exc:
        print(f"oemsim: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"oemsim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimulationError as exc:
        print(f"oemsim: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"oemsim: i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
