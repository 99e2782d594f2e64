"""Command-line front end.

    rkdv run            --problem P --N N --tau TAU --T T
    rkdv converge-time  --problem P --N N --taus 0.1,0.05 --T T
    rkdv converge-space --problem P --tau TAU --Ns 16,32 --T T
    rkdv drift          --problem P --N N --tau TAU --T T [--sample-every K]
    rkdv reproduce      {table1,table2,table4,table5,fig2,fig3} [--quick]

Exit codes: 0 success, 1 a reproduced cell is out of tolerance, 2 usage
error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .experiments import (
    drift_report_from_run,
    emit,
    momentum_drift,
    spatial_convergence,
    temporal_convergence,
)
from .problems import PROBLEMS, get_problem
from .reference import PRESETS, reproduce_preset
from .stepper import SchemeConfig, SolverError, run

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3

COMMANDS = ("run", "converge-time", "converge-space", "drift", "reproduce")


class UsageError(Exception):
    pass


@dataclass
class RunSpec:
    command: str
    problem: str | None = None
    N: int | None = None
    tau: float | None = None
    T: float | None = None
    taus: list[float] = field(default_factory=list)
    Ns: list[int] = field(default_factory=list)
    out: str | None = None
    format: str = "csv"
    iter_tol: float = 1e-14
    max_iter: int = 200
    sample_every: int = 10
    workers: int = 1
    table_id: str | None = None
    quick: bool = False
    summary: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0 or val != val or val == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return val


def _grid_size(text: str) -> int:
    val = _positive_int(text)
    if val % 2:
        raise argparse.ArgumentTypeError("N must be even")
    if val < 4:
        raise argparse.ArgumentTypeError("N must be at least 4")
    return val


def _list_of(item):
    def parse(text: str):
        parts = [p for p in text.split(",") if p.strip()]
        if not parts:
            raise argparse.ArgumentTypeError("empty list")
        return [item(p.strip()) for p in parts]

    return parse


def _build_parser() -> _Parser:
    parser = _Parser(prog="rkdv", description="LCN-MP Fourier pseudo-spectral solver for the Rosenau-KdV equation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, problem=True):
        if problem:
            p.add_argument("--problem", required=True, choices=sorted(PROBLEMS))
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol", dest="iter_tol", type=_positive_float, default=1e-14,
                       help="fixed-point stopping tolerance (max norm)")
        p.add_argument("--max-iter", type=_positive_int, default=200)

    p = sub.add_parser("run", help="single run; emits the momentum history")
    common(p)
    p.add_argument("--N", type=_grid_size, required=True)
    p.add_argument("--tau", type=_positive_float, required=True)
    p.add_argument("--T", type=_positive_float, required=True)
    p.add_argument("--sample-every", type=_positive_int, default=10)

    p = sub.add_parser("converge-time", help="temporal convergence study")
    common(p)
    p.add_argument("--N", type=_grid_size, required=True)
    p.add_argument("--taus", type=_list_of(_positive_float), required=True)
    p.add_argument("--T", type=_positive_float, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)

    p = sub.add_parser("converge-space", help="spatial convergence study")
    common(p)
    p.add_argument("--tau", type=_positive_float, required=True)
    p.add_argument("--Ns", type=_list_of(_grid_size), required=True)
    p.add_argument("--T", type=_positive_float, required=True)
    p.add_argument("--workers", type=_positive_int, default=1)

    p = sub.add_parser("drift", help="momentum drift of an unforced problem")
    common(p)
    p.add_argument("--N", type=_grid_size, required=True)
    p.add_argument("--tau", type=_positive_float, required=True)
    p.add_argument("--T", type=_positive_float, required=True)
    p.add_argument("--sample-every", type=_positive_int, default=10)

    p = sub.add_parser("reproduce", help="rerun a published table or figure and compare")
    p.add_argument("table_id", choices=PRESETS)
    p.add_argument("--quick", action="store_true", help="tau=1e-3 variants of table2/table5")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--summary", help="summary JSON path (default: <out>.summary.json)")
    return parser


def parse_args(argv) -> RunSpec:
    """Parse and validate ``argv`` (without the program name)."""
    ns = _build_parser().parse_args(list(argv))
    if ns.command is None:
        raise UsageError(f"missing command; choose from {', '.join(COMMANDS)}")
    spec = RunSpec(command=ns.command)
    for key, val in vars(ns).items():
        if key != "command" and hasattr(spec, key):
            setattr(spec, key, val)
    if spec.command == "converge-time" and any(b >= a for a, b in zip(spec.taus, spec.taus[1:])):
        raise UsageError("argument --taus: values must be strictly decreasing")
    if spec.command == "converge-space" and any(b <= a for a, b in zip(spec.Ns, spec.Ns[1:])):
        raise UsageError("argument --Ns: values must be strictly increasing")
    if spec.command == "drift" and not get_problem(spec.problem).homogeneous:
        raise UsageError(f"argument --problem: {spec.problem} is forced, momentum drift is undefined")
    return spec


def _format_cell(x):
    if x is None:
        return "-"
    return f"{x:.4e}" if isinstance(x, float) else str(x)


def _print_checks(table_id, checks, stream):
    width = max(len(c.label) for c in checks)
    print(f"{table_id}: observed vs reference", file=stream)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"  [{status}] {c.label:<{width}}  observed {_format_cell(c.observed):>11}  "
              f"reference {_format_cell(c.expected):>11}  ({c.rule})", file=stream)


def _reproduce(spec: RunSpec) -> int:
    report, checks = reproduce_preset(spec.table_id, quick=spec.quick)
    emit(report, spec.format, spec.out)
    _print_checks(spec.table_id, checks, sys.stderr)
    passed = all(c.passed for c in checks)
    summary = {
        "preset": spec.table_id,
        "quick": spec.quick,
        "passed": passed,
        "checks": [asdict(c) for c in checks],
    }
    text = json.dumps(summary, indent=2)
    summary_path = spec.summary or (f"{spec.out}.summary.json" if spec.out else None)
    if summary_path:
        Path(summary_path).write_text(text + "\n")
    else:
        print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK if passed else EXIT_TOLERANCE


def execute(spec: RunSpec) -> int:
    if spec.command == "reproduce":
        return _reproduce(spec)
    problem = get_problem(spec.problem)
    opts = dict(iter_tol=spec.iter_tol, max_iter=spec.max_iter)
    if spec.command == "run":
        cfg = SchemeConfig.for_problem(problem, spec.tau, **opts)
        report = drift_report_from_run(run(problem, spec.N, cfg, spec.T), problem, cfg, spec.sample_every)
    elif spec.command == "drift":
        report = momentum_drift(problem, spec.N, spec.tau, spec.T, spec.sample_every, **opts)
    elif spec.command == "converge-time":
        report = temporal_convergence(problem, spec.N, spec.taus, spec.T, workers=spec.workers, **opts)
    else:
        report = spatial_convergence(problem, spec.tau, spec.Ns, spec.T, workers=spec.workers, **opts)
    emit(report, spec.format, spec.out)
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        spec = parse_args(argv)
    except UsageError as exc:
        print(f"rkdv: error: {exc}", file=sys.stderr)
        print("usage: rkdv {" + ",".join(COMMANDS) + "} ... (see rkdv --help)", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return execute(spec)
    except SolverError as exc:
        print(f"rkdv: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"rkdv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"rkdv: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
