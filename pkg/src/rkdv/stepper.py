"""Linearized Crank-Nicolson momentum-preserving (LCN-MP) time stepping.

One step from U^n to U^{n+1} solves for the midpoint V = (U^{n+1} + U^n)/2

    (I + A^2) V + (tau/2) D(Uhat) V = (I + A^2) U^n + (tau/2) g

with the nonlinear coefficient frozen at Uhat = (3 U^n - U^{n-1})/2 (Uhat =
U^0 on the bootstrap step), then sets U^{n+1} = 2 V - U^n. The linear system
is solved by fixed-point sweeps that lag only the nonlinear part, so each
sweep is a division in Fourier space.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .mesh import Grid, MeshFunction, _same_grid
from .problems import Problem
from .spectral import OperatorSymbol, SpectralTable, build_tables, symbol_A, symbol_B, symbol_Lh

__all__ = [
    "SchemeConfig",
    "StepState",
    "StepDiagnostics",
    "RunResult",
    "SolverError",
    "NonConvergence",
    "NonFinite",
    "momentum",
    "timestep_symbol",
    "solve_halfstep",
    "first_step",
    "step",
    "run",
]

# Bootstrap forcing time. "start" samples g at t=0, "midpoint" at tau/2.
BOOTSTRAP_MODES = ("start", "midpoint")


class SolverError(RuntimeError):
    pass


class NonConvergence(SolverError):
    def __init__(self, message, residual=float("nan"), step=None):
        super().__init__(message)
        self.residual = residual
        self.step = step


class NonFinite(SolverError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


@dataclass(frozen=True)
class SchemeConfig:
    tau: float
    p: int = 1
    iter_tol: float = 1e-14
    max_iter: int = 200
    source: Callable | None = None
    bootstrap_source: str = "start"

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be an integer >= 1, got {self.p!r}")
        if not self.iter_tol > 0:
            raise ValueError(f"iter_tol must be positive, got {self.iter_tol!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")
        if self.bootstrap_source not in BOOTSTRAP_MODES:
            raise ValueError(f"bootstrap_source must be one of {BOOTSTRAP_MODES}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "max_iter", int(self.max_iter))

    @classmethod
    def for_problem(cls, problem: Problem, tau: float, **kw) -> "SchemeConfig":
        return cls(tau=tau, p=problem.p, source=problem.source, **kw)


@dataclass(frozen=True)
class StepDiagnostics:
    iterations_used: int
    final_residual: float
    momentum: float


@dataclass(frozen=True, eq=False)
class StepState:
    n: int
    U_prev: MeshFunction | None
    U_curr: MeshFunction
    P0: float
    t: float
    diagnostics: StepDiagnostics | None = None


@dataclass(eq=False)
class RunResult:
    grid: Grid
    final: MeshFunction
    times: np.ndarray
    momentum: np.ndarray
    iterations: np.ndarray
    residuals: np.ndarray
    wall_seconds: float = 0.0

    @property
    def P0(self) -> float:
        return float(self.momentum[0])

    @property
    def max_relative_drift(self) -> float:
        P0 = self.P0
        return float(np.max(np.abs(self.momentum - P0)) / abs(P0)) if P0 else 0.0


@dataclass(frozen=True, eq=False)
class _Operators:
    m: np.ndarray
    a2p1: np.ndarray
    lh: np.ndarray
    a_sym: np.ndarray


@functools.lru_cache(maxsize=32)
def _laplacian(grid: Grid) -> np.ndarray:
    return np.ascontiguousarray(symbol_A(build_tables(grid)).values.real)


@functools.lru_cache(maxsize=32)
def _operators(grid: Grid, tau: float) -> _Operators:
    table = build_tables(grid)
    a = _laplacian(grid)
    return _Operators(
        m=np.ascontiguousarray(timestep_symbol(table, tau).values),
        a2p1=1.0 + a * a,
        lh=np.ascontiguousarray(symbol_Lh(table).values),
        a_sym=a,
    )


def _as_array(U: MeshFunction) -> np.ndarray:
    return np.ascontiguousarray(U.matrix)


def momentum(U: MeshFunction) -> float:
    """Discrete momentum ||U||_h^2 + |U|_{2,h}^2."""
    return float(_kernels.momentum(_as_array(U), _laplacian(U.grid), U.grid.cell))


def timestep_symbol(table: SpectralTable, tau: float) -> OperatorSymbol:
    """Symbol of I + A^2 + (tau/2)(B + Lh); its real part is >= 1."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    a = symbol_A(table).values.real
    vals = 1.0 + a * a + 0.5 * tau * (symbol_B(table).values + symbol_Lh(table).values)
    return OperatorSymbol(table.grid, "timestep", vals)


def _sample_source(cfg: SchemeConfig, grid: Grid, t: float) -> np.ndarray | None:
    if cfg.source is None:
        return None
    return np.ascontiguousarray(grid.sample(cfg.source, t).matrix)


def _raise_for(status, resid, step_index, cfg):
    if status == _kernels.NON_FINITE:
        raise NonFinite(f"non-finite iterate in step {step_index}", step=step_index)
    if status == _kernels.NOT_CONVERGED:
        raise NonConvergence(
            f"fixed-point iteration did not reach {cfg.iter_tol:g} in {cfg.max_iter} sweeps "
            f"(step {step_index}, last difference {resid:.3e})",
            residual=resid,
            step=step_index,
        )


def solve_halfstep(
    U_n: MeshFunction,
    U_hat: MeshFunction,
    t_half: float,
    cfg: SchemeConfig,
    table: SpectralTable | None = None,
    source_time: float | None = None,
) -> tuple[MeshFunction, StepDiagnostics]:
    """Midpoint value of one step; the forcing is sampled at ``source_time``
    (defaults to ``t_half``). Starts the sweeps from ``U_n``."""
    _same_grid(U_n, U_hat)
    grid = U_n.grid
    if table is not None and table.grid != grid:
        raise ValueError("spectral table built for another grid")
    ops = _operators(grid, cfg.tau)
    un = _as_array(U_n)
    w = _kernels.int_power(_as_array(U_hat), cfg.p)
    rhs_hat = ops.a2p1 * np.fft.fft2(un)
    g = _sample_source(cfg, grid, t_half if source_time is None else source_time)
    if g is not None:
        rhs_hat = rhs_hat + 0.5 * cfg.tau * np.fft.fft2(g)
    c = cfg.tau / (2.0 * (cfg.p + 2))
    half, it, diff, status = _kernels.halfstep(un, w, rhs_hat, ops.m, ops.lh, c, cfg.iter_tol, cfg.max_iter)
    _raise_for(status, diff, None, cfg)
    mom = float(_kernels.momentum(half, ops.a_sym, grid.cell))
    return MeshFunction.from_matrix(grid, half), StepDiagnostics(int(it), float(diff), mom)


def first_step(U0: MeshFunction, cfg: SchemeConfig, table: SpectralTable | None = None) -> StepState:
    """Bootstrap step, linearised about U^0; returns the state holding (U^0, U^1)."""
    src_t = 0.0 if cfg.bootstrap_source == "start" else 0.5 * cfg.tau
    half, diag = solve_halfstep(U0, U0, 0.5 * cfg.tau, cfg, table, source_time=src_t)
    U1 = MeshFunction(U0.grid, 2.0 * half.values - U0.values)
    P1 = momentum(U1)
    return StepState(1, U0, U1, momentum(U0), cfg.tau, replace(diag, momentum=P1))


def _advance(state: StepState, cfg: SchemeConfig, n_steps: int, sources: np.ndarray | None):
    grid = state.U_curr.grid
    ops = _operators(grid, cfg.tau)
    forced = sources is not None
    if not forced:
        sources = np.zeros((1, 1, 1))
    return _kernels.advance(
        _as_array(state.U_prev), _as_array(state.U_curr), n_steps, sources, forced,
        ops.m, ops.a2p1, ops.lh, ops.a_sym, cfg.tau, cfg.p, cfg.iter_tol, cfg.max_iter, grid.cell,
    )


def step(state: StepState, cfg: SchemeConfig, table: SpectralTable | None = None) -> StepState:
    """One extrapolated three-level step from (U^{n-1}, U^n) to (U^n, U^{n+1})."""
    if state.U_prev is None:
        raise ValueError("state has a single level; call first_step first")
    grid = state.U_curr.grid
    if table is not None and table.grid != grid:
        raise ValueError("spectral table built for another grid")
    g = _sample_source(cfg, grid, (state.n + 0.5) * cfg.tau)
    sources = None if g is None else g[None]
    _, u_next, iters, resid, moms, done, status = _advance(state, cfg, 1, sources)
    _raise_for(status, resid[0], state.n + 1, cfg)
    diag = StepDiagnostics(int(iters[0]), float(resid[0]), float(moms[0]))
    return StepState(
        state.n + 1, state.U_curr, MeshFunction.from_matrix(grid, u_next),
        state.P0, (state.n + 1) * cfg.tau, diag,
    )


def _step_count(T: float, tau: float) -> int:
    M = int(round(T / tau))
    if M < 1 or abs(M * tau - T) > 1e-12 * max(1.0, abs(T)):
        raise ValueError(f"T={T!r} is not a positive integer multiple of tau={tau!r}")
    return M


def _source_block(cfg: SchemeConfig, grid: Grid, t_half: np.ndarray) -> np.ndarray:
    X, Y = grid.coordinates()
    try:
        block = np.asarray(cfg.source(X[None], Y[None], t_half[:, None, None]), dtype=float)
        if block.shape == (t_half.size,) + grid.shape:
            return np.ascontiguousarray(block)
    except (TypeError, ValueError):
        pass
    return np.stack([_sample_source(cfg, grid, float(t)) for t in t_half])


Observer = Callable[[StepState], None]

_BLOCK_POINTS = 1 << 21


def run(
    problem: Problem,
    N: int | Grid,
    cfg: SchemeConfig,
    T: float,
    observers: Sequence[Observer] = (),
    observe_every: int = 1,
) -> RunResult:
    """Integrate ``problem`` to time ``T`` on an N-point (per axis) grid.

    Steps after the bootstrap run in compiled blocks; observers, if any, are
    called after the bootstrap step and then every ``observe_every`` steps.
    """
    grid = N if isinstance(N, Grid) else problem.grid(N)
    M = _step_count(T, cfg.tau)
    t0 = time.perf_counter()
    U0 = problem.initial_data(grid)
    state = first_step(U0, cfg)
    moms = np.empty(M + 1)
    iters = np.empty(M, dtype=np.int64)
    resid = np.empty(M)
    moms[0], moms[1] = state.P0, state.diagnostics.momentum
    iters[0], resid[0] = state.diagnostics.iterations_used, state.diagnostics.final_residual
    for obs in observers:
        obs(state)

    if observers:
        block = max(1, int(observe_every))
    else:
        block = max(1, _BLOCK_POINTS // grid.size) if cfg.source is not None else M
    u_prev, u_curr = _as_array(state.U_prev), _as_array(state.U_curr)
    n = 1
    while n < M:
        k = min(block, M - n)
        sources = None
        if cfg.source is not None:
            sources = _source_block(cfg, grid, (np.arange(n, n + k) + 0.5) * cfg.tau)
        cur = StepState(n, MeshFunction.from_matrix(grid, u_prev), MeshFunction.from_matrix(grid, u_curr), state.P0, n * cfg.tau)
        u_prev, u_curr, it, rs, ms, done, status = _advance(cur, cfg, k, sources)
        iters[n : n + done] = it[:done]
        resid[n : n + done] = rs[:done]
        moms[n + 1 : n + 1 + done] = ms[:done]
        if status != _kernels.OK:
            _raise_for(status, rs[done], n + done + 1, cfg)
        n += k
        if observers:
            diag = StepDiagnostics(int(it[done - 1]), float(rs[done - 1]), float(ms[done - 1]))
            st = StepState(n, MeshFunction.from_matrix(grid, u_prev), MeshFunction.from_matrix(grid, u_curr), state.P0, n * cfg.tau, diag)
            for obs in observers:
                obs(st)
    final = MeshFunction.from_matrix(grid, u_curr)
    return RunResult(
        grid=grid,
        final=final,
        times=cfg.tau * np.arange(M + 1),
        momentum=moms,
        iterations=iters,
        residuals=resid,
        wall_seconds=time.perf_counter() - t0,
    )
