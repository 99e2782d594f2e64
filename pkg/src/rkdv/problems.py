"""Benchmark problems for the generalized Rosenau-KdV equation

    u_t + Delta^2 u_t + Delta u_x + (1 + u^p) L u = g,   L = d/dx + d/dy,

on periodic boxes. All callables take ``(x, y, t)`` numpy arrays and
broadcast; 1D problems ignore ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Grid, MeshFunction, build_grid

__all__ = [
    "Problem",
    "rkdv1d_soliton",
    "grkdv2d_manufactured",
    "grkdv2d_periodic",
    "get_problem",
    "PROBLEMS",
    "error_inf",
]

SpaceTimeFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Problem:
    name: str
    dim: int
    x_range: tuple[float, float]
    y_range: tuple[float, float] | None
    p: int
    initial: Callable[[np.ndarray, np.ndarray], np.ndarray]
    exact: SpaceTimeFn | None = None
    source: SpaceTimeFn | None = None

    def grid(self, N: int) -> Grid:
        """Square grid (N points per active axis) on the problem's domain."""
        if self.dim == 1:
            return build_grid(1, self.x_range, N1=N)
        return build_grid(2, self.x_range, self.y_range, N, N)

    def initial_data(self, grid: Grid) -> MeshFunction:
        return grid.sample(lambda x, y: self.initial(x, y))

    @property
    def homogeneous(self) -> bool:
        return self.source is None


def rkdv1d_soliton() -> Problem:
    """Travelling sech^4 solitary wave of u_t + u_xxxxt + u_xxx + u_x + u u_x = 0."""
    r = math.sqrt(313.0)
    amp = -35.0 / 24.0 + 35.0 / 312.0 * r
    k = math.sqrt(-26.0 + 2.0 * r) / 24.0
    c = 0.5 + r / 26.0

    def exact(x, y, t):
        return amp / np.cosh(k * (x - c * t)) ** 4

    def initial(x, y):
        return exact(x, y, 0.0)

    return Problem("soliton1d", 1, (-50.0, 50.0), None, 1, initial, exact)


def grkdv2d_manufactured(p: int = 2) -> Problem:
    """u = sin(2 pi x) sin(2 pi y) exp(-t) on [0, 1]^2, kept exact by a forcing term."""
    tp = 2.0 * math.pi

    def exact(x, y, t):
        return np.sin(tp * x) * np.sin(tp * y) * np.exp(-t)

    def initial(x, y):
        return np.sin(tp * x) * np.sin(tp * y)

    def source(x, y, t):
        e = np.exp(-t)
        sx, sy = np.sin(tp * x), np.sin(tp * y)
        return (
            sx * sy * e * (-64.0 * math.pi**4 - 1.0)
            - 16.0 * math.pi**3 * np.cos(tp * x) * sy * e
            + tp * e * np.sin(tp * (x + y)) * (1.0 + sx**p * sy**p * np.exp(-p * t))
        )

    return Problem("manufactured2d", 2, (0.0, 1.0), (0.0, 1.0), p, initial, exact, source)


def grkdv2d_periodic() -> Problem:
    """Unforced 2D run from 0.1 (1 + sin 3x sin 5y) on [0, 2 pi]^2; no exact solution."""

    def initial(x, y):
        return 0.1 * (1.0 + np.sin(3.0 * x) * np.sin(5.0 * y))

    return Problem("periodic2d", 2, (0.0, 2 * math.pi), (0.0, 2 * math.pi), 2, initial)


PROBLEMS: dict[str, Callable[[], Problem]] = {
    "soliton1d": rkdv1d_soliton,
    "manufactured2d": grkdv2d_manufactured,
    "periodic2d": grkdv2d_periodic,
}


def get_problem(name: str) -> Problem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None


def error_inf(U: MeshFunction, problem: Problem, t: float) -> float:
    """Max-norm error against the exact solution at the collocation points."""
    if problem.exact is None:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    ref = U.grid.sample(problem.exact, t)
    return float(np.max(np.abs(U.values - ref.values)))
