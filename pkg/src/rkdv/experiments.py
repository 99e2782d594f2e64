"""Convergence studies, momentum-drift runs and report serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import _accel
from .problems import PROBLEMS, Problem, error_inf, get_problem
from .stepper import SchemeConfig, run

__all__ = [
    "ConvergenceRow",
    "ConvergenceReport",
    "DriftSample",
    "DriftReport",
    "temporal_rate",
    "spatial_rate",
    "temporal_convergence",
    "spatial_convergence",
    "momentum_drift",
    "drift_report_from_run",
    "emit",
    "load_report",
]


@dataclass
class ConvergenceRow:
    resolution: float
    error_inf: float
    rate: float | None
    wall_seconds: float


@dataclass
class ConvergenceReport:
    axis: str
    rows: list[ConvergenceRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def errors(self) -> list[float]:
        return [r.error_inf for r in self.rows]

    @property
    def rates(self) -> list[float | None]:
        return [r.rate for r in self.rows]


@dataclass
class DriftSample:
    t: float
    momentum: float
    drift: float


@dataclass
class DriftReport:
    P0: float
    samples: list[DriftSample] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def max_relative_drift(self) -> float:
        if not self.samples or self.P0 == 0:
            return 0.0
        return max(abs(s.drift) for s in self.samples) / abs(self.P0)


def temporal_rate(e_prev: float, e_next: float) -> float:
    """Observed order when tau is halved."""
    return math.log2(e_prev / e_next)


def spatial_rate(e_prev: float, e_next: float, n_prev: int, n_next: int) -> float:
    return math.log(e_prev / e_next) / math.log(n_next / n_prev)


def _solve_error(problem_name: str, N: int, tau: float, T: float, iter_tol: float, max_iter: int, bootstrap: str):
    problem = get_problem(problem_name)
    return _solve_error_for(problem, N, tau, T, iter_tol, max_iter, bootstrap)


def _solve_error_for(problem: Problem, N, tau, T, iter_tol, max_iter, bootstrap):
    cfg = SchemeConfig.for_problem(problem, tau, iter_tol=iter_tol, max_iter=max_iter, bootstrap_source=bootstrap)
    res = run(problem, N, cfg, T)
    return error_inf(res.final, problem, T), res.wall_seconds


def _map_runs(problem: Problem, jobs, workers: int):
    # worker processes rebuild the problem by name, closures do not pickle
    if workers > 1 and problem.name in PROBLEMS:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_error, problem.name, *job) for job in jobs]
            return [f.result() for f in futures]
    return [_solve_error_for(problem, *job) for job in jobs]


def _base_metadata(problem: Problem, T, iter_tol, max_iter, bootstrap) -> dict:
    return {
        "problem": problem.name,
        "p": problem.p,
        "T": T,
        "iter_tol": iter_tol,
        "max_iter": max_iter,
        "bootstrap_source": bootstrap,
        "backend": _accel.BACKEND,
    }


def temporal_convergence(
    problem: Problem,
    N: int,
    taus: Sequence[float],
    T: float,
    iter_tol: float = 1e-14,
    max_iter: int = 200,
    bootstrap_source: str = "start",
    workers: int = 1,
) -> ConvergenceReport:
    taus = [float(t) for t in taus]
    if any(b >= a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be strictly decreasing")
    jobs = [(N, tau, T, iter_tol, max_iter, bootstrap_source) for tau in taus]
    results = _map_runs(problem, jobs, workers)
    rows = []
    for i, (tau, (err, secs)) in enumerate(zip(taus, results)):
        rate = temporal_rate(results[i - 1][0], err) if i else None
        rows.append(ConvergenceRow(tau, err, rate, secs))
    meta = _base_metadata(problem, T, iter_tol, max_iter, bootstrap_source)
    meta["N"] = N
    return ConvergenceReport("temporal", rows, meta)


def spatial_convergence(
    problem: Problem,
    tau: float,
    Ns: Sequence[int],
    T: float,
    iter_tol: float = 1e-14,
    max_iter: int = 200,
    bootstrap_source: str = "start",
    workers: int = 1,
) -> ConvergenceReport:
    """One run per N at fixed tau.

    Once the spatial error drops below the time-discretisation error the
    errors stop decreasing; ``metadata["floor_from"]`` records the first such
    N (None if the floor is not reached).
    """
    Ns = [int(n) for n in Ns]
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError("Ns must be strictly increasing")
    jobs = [(n, tau, T, iter_tol, max_iter, bootstrap_source) for n in Ns]
    results = _map_runs(problem, jobs, workers)
    rows = []
    floor_from = None
    for i, (n, (err, secs)) in enumerate(zip(Ns, results)):
        rate = None
        if i:
            prev = results[i - 1][0]
            rate = spatial_rate(prev, err, Ns[i - 1], n)
            if floor_from is None and err > 0.5 * prev:
                floor_from = n
        rows.append(ConvergenceRow(n, err, rate, secs))
    meta = _base_metadata(problem, T, iter_tol, max_iter, bootstrap_source)
    meta["tau"] = tau
    meta["floor_from"] = floor_from
    return ConvergenceReport("spatial", rows, meta)


def momentum_drift(
    problem: Problem,
    N: int,
    tau: float,
    T: float,
    sample_every: int = 10,
    iter_tol: float = 1e-14,
    max_iter: int = 200,
) -> DriftReport:
    """Momentum history of an unforced run, sampled every ``sample_every`` steps
    (the final step is always included)."""
    if not problem.homogeneous:
        raise ValueError(f"problem {problem.name!r} is forced; momentum is not conserved")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    cfg = SchemeConfig.for_problem(problem, tau, iter_tol=iter_tol, max_iter=max_iter)
    res = run(problem, N, cfg, T)
    return drift_report_from_run(res, problem, cfg, sample_every)


def drift_report_from_run(res, problem: Problem, cfg: SchemeConfig, sample_every: int = 10) -> DriftReport:
    """Subsample a run's momentum history into a report."""
    M = res.times.size - 1
    idx = list(range(0, M + 1, sample_every))
    if idx[-1] != M:
        idx.append(M)
    P0 = res.P0
    samples = [DriftSample(float(res.times[i]), float(res.momentum[i]), float(res.momentum[i] - P0)) for i in idx]
    meta = {
        "problem": problem.name,
        "N": res.grid.N1,
        "tau": cfg.tau,
        "T": float(res.times[-1]),
        "iter_tol": cfg.iter_tol,
        "max_iter": cfg.max_iter,
        "max_relative_drift": res.max_relative_drift,
        "max_iterations": int(res.iterations.max()),
        "wall_seconds": res.wall_seconds,
        "backend": _accel.BACKEND,
    }
    if problem.exact is not None:
        meta["error_inf"] = error_inf(res.final, problem, float(res.times[-1]))
    return DriftReport(P0, samples, meta)


# --- serialisation ----------------------------------------------------------

CONVERGENCE_COLUMNS = ("resolution", "error_inf", "rate", "wall_seconds")
DRIFT_COLUMNS = ("t", "momentum", "drift")


def _fmt_resolution(r) -> str:
    return str(int(r)) if float(r).is_integer() and r >= 1 else f"{r:g}"


def _csv_text(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(report, ConvergenceReport):
        w.writerow(CONVERGENCE_COLUMNS)
        for r in report.rows:
            rate = "" if r.rate is None else f"{r.rate:.2f}"
            w.writerow([_fmt_resolution(r.resolution), f"{r.error_inf:.5e}", rate, f"{r.wall_seconds:.3f}"])
    elif isinstance(report, DriftReport):
        w.writerow(DRIFT_COLUMNS)
        for s in report.samples:
            w.writerow([f"{s.t:.10g}", f"{s.momentum:.17g}", f"{s.drift:.6e}"])
    else:
        raise TypeError(f"cannot emit {type(report).__name__}")
    return buf.getvalue()


def _json_text(report) -> str:
    if isinstance(report, ConvergenceReport):
        doc = {"kind": "convergence", "axis": report.axis, "metadata": report.metadata,
               "rows": [asdict(r) for r in report.rows]}
    elif isinstance(report, DriftReport):
        doc = {"kind": "drift", "P0": report.P0, "metadata": report.metadata,
               "samples": [asdict(s) for s in report.samples]}
    else:
        raise TypeError(f"cannot emit {type(report).__name__}")
    return json.dumps(doc, indent=2) + "\n"


def emit(report, format: str = "csv", path: str | Path | None = None) -> None:
    """Write ``report`` as CSV or JSON to ``path`` (stdout when None)."""
    if format == "csv":
        text = _csv_text(report)
    elif format == "json":
        text = _json_text(report)
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {format!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def load_report(path: str | Path):
    """Read a report written by ``emit(..., format="json")``."""
    doc = json.loads(Path(path).read_text())
    if doc.get("kind") == "convergence":
        rows = [ConvergenceRow(**r) for r in doc["rows"]]
        return ConvergenceReport(doc["axis"], rows, doc["metadata"])
    if doc.get("kind") == "drift":
        return DriftReport(doc["P0"], [DriftSample(**s) for s in doc["samples"]], doc["metadata"])
    raise ValueError(f"{path}: not a report document")
