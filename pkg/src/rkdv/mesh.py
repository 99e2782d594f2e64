"""Periodic collocation grids, mesh functions and finite-difference norms.

Mesh-function values are stored flat with ``j1`` varying fastest, i.e. the
column-stacked ``vec`` of the ``N1 x N2`` value matrix. ``MeshFunction.matrix``
gives that matrix as a view. One-dimensional problems live on a degenerate
grid with ``N2 == 1`` and ``h2 == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Grid",
    "MeshFunction",
    "build_grid",
    "inner",
    "norm_h",
    "norm_inf",
    "fd_diff_forward",
    "fd_diff_backward",
    "fd_laplacian",
    "fd_gradient_norm",
    "fd_laplacian_norm",
    "norm_H2",
    "linf_interpolation_ratio",
]


@dataclass(frozen=True)
class Grid:
    dim: int
    N1: int
    N2: int
    x_range: tuple[float, float]
    y_range: tuple[float, float] | None
    h1: float
    h2: float
    mu1: float
    mu2: float

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N1, self.N2)

    @property
    def size(self) -> int:
        return self.N1 * self.N2

    @property
    def cell(self) -> float:
        """Quadrature weight h1*h2 (just h1 in 1D)."""
        return self.h1 * self.h2

    @property
    def area(self) -> float:
        return self.cell * self.size

    def active_axes(self) -> tuple[str, ...]:
        return ("x",) if self.dim == 1 else ("x", "y")

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Collocation points as two ``(N1, N2)`` arrays (``ij`` indexing)."""
        x = self.x_range[0] + self.h1 * np.arange(self.N1)
        if self.dim == 1:
            y = np.zeros(1)
        else:
            y = self.y_range[0] + self.h2 * np.arange(self.N2)
        return np.meshgrid(x, y, indexing="ij")

    def sample(self, fn, *args) -> "MeshFunction":
        """Evaluate ``fn(x, y, *args)`` at the collocation points."""
        X, Y = self.coordinates()
        vals = np.broadcast_to(np.asarray(fn(X, Y, *args), dtype=float), self.shape)
        return MeshFunction.from_matrix(self, vals)


def _check_axis_count(name: str, n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n % 2:
        raise ValueError(f"{name} must be even, got {n}")
    if n < 4:
        raise ValueError(f"{name} must be at least 4, got {n}")
    return n


def _check_range(name: str, rng) -> tuple[float, float]:
    if rng is None or len(rng) != 2:
        raise ValueError(f"{name} must be a pair (left, right)")
    lo, hi = float(rng[0]), float(rng[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError(f"{name} must satisfy left < right, got {rng!r}")
    return lo, hi


def build_grid(dim: int, x_range, y_range=None, N1: int = 0, N2: int | None = None) -> Grid:
    """Build a uniform periodic grid on ``x_range`` (x ``y_range`` in 2D).

    >>> g = build_grid(2, (0, 2 * math.pi), (0, 2 * math.pi), 8, 8)
    >>> round(g.h1 / math.pi, 12), g.mu1
    (0.25, 1.0)
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim!r}")
    N1 = _check_axis_count("N1", N1)
    xr = _check_range("x_range", x_range)
    l1 = xr[1] - xr[0]
    if dim == 1:
        return Grid(1, N1, 1, xr, None, l1 / N1, 1.0, 2 * math.pi / l1, 0.0)
    N2 = _check_axis_count("N2", N1 if N2 is None else N2)
    yr = _check_range("y_range", y_range)
    l2 = yr[1] - yr[0]
    return Grid(2, N1, N2, xr, yr, l1 / N1, l2 / N2, 2 * math.pi / l1, 2 * math.pi / l2)


@dataclass(frozen=True, eq=False)
class MeshFunction:
    """Real grid function; ``values`` is read-only and column-stacked."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values, got {vals.size}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("mesh function has non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_matrix(cls, grid: Grid, mat) -> "MeshFunction":
        mat = np.asarray(mat, dtype=float).reshape(grid.shape)
        return cls(grid, mat.reshape(-1, order="F"))

    @classmethod
    def zeros(cls, grid: Grid) -> "MeshFunction":
        return cls(grid, np.zeros(grid.size))

    @property
    def matrix(self) -> np.ndarray:
        """``(N1, N2)`` view, entry ``[j1, j2]``."""
        return self.values.reshape(self.grid.shape, order="F")

    def at(self, j1: int, j2: int = 0) -> float:
        """Periodic access: indices wrap modulo ``N1`` and ``N2``."""
        return float(self.matrix[j1 % self.grid.N1, j2 % self.grid.N2])

    def _coerce(self, other):
        if isinstance(other, MeshFunction):
            _same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return MeshFunction(self.grid, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return MeshFunction(self.grid, self.values - self._coerce(other))

    def __rsub__(self, other):
        return MeshFunction(self.grid, self._coerce(other) - self.values)

    def __mul__(self, other):
        return MeshFunction(self.grid, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return MeshFunction(self.grid, -self.values)

    def __len__(self):
        return self.values.size


def _same_grid(U: MeshFunction, V: MeshFunction) -> None:
    if U.grid != V.grid:
        raise ValueError("mesh functions live on different grids")


def inner(U: MeshFunction, V: MeshFunction) -> float:
    _same_grid(U, V)
    return U.grid.cell * float(np.dot(U.values, V.values))


def norm_h(U: MeshFunction) -> float:
    return math.sqrt(inner(U, U))


def norm_inf(U: MeshFunction) -> float:
    return float(np.max(np.abs(U.values)))


def _axis_index(grid: Grid, axis) -> int:
    if axis in ("x", 0):
        return 0
    if axis in ("y", 1):
        if grid.dim == 1:
            raise ValueError("axis 'y' is inactive on a 1D grid")
        return 1
    raise ValueError(f"unknown axis {axis!r}")


def fd_diff_forward(U: MeshFunction, axis="x") -> MeshFunction:
    """Periodic forward difference (U[j+1] - U[j]) / h along ``axis``."""
    ax = _axis_index(U.grid, axis)
    h = U.grid.h1 if ax == 0 else U.grid.h2
    M = U.matrix
    return MeshFunction.from_matrix(U.grid, (np.roll(M, -1, axis=ax) - M) / h)


def fd_diff_backward(U: MeshFunction, axis="x") -> MeshFunction:
    ax = _axis_index(U.grid, axis)
    h = U.grid.h1 if ax == 0 else U.grid.h2
    M = U.matrix
    return MeshFunction.from_matrix(U.grid, (M - np.roll(M, 1, axis=ax)) / h)


def fd_laplacian(U: MeshFunction) -> MeshFunction:
    """Three-point (1D) or five-point (2D) periodic Laplacian."""
    g = U.grid
    M = U.matrix
    out = (np.roll(M, -1, axis=0) - 2 * M + np.roll(M, 1, axis=0)) / g.h1**2
    if g.dim == 2:
        out = out + (np.roll(M, -1, axis=1) - 2 * M + np.roll(M, 1, axis=1)) / g.h2**2
    return MeshFunction.from_matrix(g, out)


def fd_gradient_norm(U: MeshFunction) -> float:
    total = sum(norm_h(fd_diff_forward(U, ax)) ** 2 for ax in U.grid.active_axes())
    return math.sqrt(total)


def fd_laplacian_norm(U: MeshFunction) -> float:
    return norm_h(fd_laplacian(U))


def norm_H2(U: MeshFunction) -> float:
    return math.sqrt(norm_h(U) ** 2 + fd_gradient_norm(U) ** 2 + fd_laplacian_norm(U) ** 2)


def linf_interpolation_ratio(U: MeshFunction) -> float:
    """||U||_inf^2 / (||U||_h (||Delta_h U||_h + ||U||_h)).

    The discrete Sobolev-type bound says this stays below a grid-independent
    constant; the constant is not known, so callers only monitor it.
    """
    l2 = norm_h(U)
    if l2 == 0.0:
        return 0.0
    return norm_inf(U) ** 2 / (l2 * (fd_laplacian_norm(U) + l2))
