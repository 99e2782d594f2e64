"""Fourier pseudo-spectral differentiation on periodic grids.

Every spectral differentiation matrix is diagonalised by the DFT, so
operators are stored as their eigenvalues ("symbols") on the 2D frequency
grid and applied with one forward and one inverse FFT. Conventions:
unnormalised forward transform, ``1/(N1*N2)`` on the inverse.

Odd-order derivatives zero the Nyquist mode; even orders keep it.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .mesh import Grid, MeshFunction, _same_grid, norm_h

__all__ = [
    "SpectralTable",
    "OperatorSymbol",
    "SymbolError",
    "build_tables",
    "axis_eigenvalues",
    "apply_symbol",
    "symbol_A",
    "symbol_A2",
    "symbol_B",
    "symbol_Lh",
    "apply_D",
    "seminorm_1h",
    "seminorm_2h",
    "norm_Lh",
    "dense_oracle",
    "dft_matrix",
]

IMAG_RESIDUE_TOL = 1e-10
DENSE_MAX_POINTS = 64


class SymbolError(RuntimeError):
    """A symbol produced a visibly complex result from real input."""


def axis_eigenvalues(n: int, mu: float, h: float):
    """Eigenvalues (d1, d2, b) of D1, D2 and the FD matrix B on one axis.

    ``n == 1`` is the inactive axis of a 1D grid and yields zeros.
    """
    k = np.fft.fftfreq(n, 1.0 / n)
    d1 = 1j * k * mu
    if n % 2 == 0:
        d1[n // 2] = 0.0
    d2 = -((k * mu) ** 2)
    b = -(4.0 / h**2) * np.sin(np.arange(n) * math.pi / n) ** 2
    return d1, d2, b


@dataclass(frozen=True, eq=False)
class SpectralTable:
    grid: Grid
    lam_d1x: np.ndarray
    lam_d2x: np.ndarray
    lam_d1y: np.ndarray
    lam_d2y: np.ndarray
    lam_b1: np.ndarray
    lam_b2: np.ndarray

    def __post_init__(self):
        for name in ("lam_d1x", "lam_d2x", "lam_d1y", "lam_d2y", "lam_b1", "lam_b2"):
            getattr(self, name).setflags(write=False)

    def inequality_violations(self, rtol: float = 1e-12) -> list[str]:
        """Entrywise checks of the D1/D2/B eigenvalue chains on both axes.

        0 <= -(4/pi^2) d1^2 <= -(4/pi^2) d2 <= -b <= -d2 and
        0 <= (16/pi^4) d2^2 <= b^2 <= d2^2, each link allowed ``rtol`` relative
        slack for round-off. Returns one message per violated link.
        """
        bad = []
        c1, c2 = 4 / math.pi**2, 16 / math.pi**4
        axes = (("x", self.lam_d1x, self.lam_d2x, self.lam_b1), ("y", self.lam_d1y, self.lam_d2y, self.lam_b2))
        for ax, d1, d2, b in axes:
            zero = np.zeros_like(d2)
            first = [zero, -c1 * (d1 * d1).real, -c1 * d2, -b, -d2]
            second = [zero, c2 * d2**2, b**2, d2**2]
            for name, chain in (("first", first), ("squared", second)):
                for i in range(len(chain) - 1):
                    lo, hi = chain[i], chain[i + 1]
                    if np.any(lo > hi + rtol * np.maximum(1.0, np.abs(hi))):
                        bad.append(f"{ax}: {name} chain link {i} violated")
        return bad


@functools.lru_cache(maxsize=64)
def build_tables(grid: Grid) -> SpectralTable:
    d1x, d2x, b1 = axis_eigenvalues(grid.N1, grid.mu1, grid.h1)
    d1y, d2y, b2 = axis_eigenvalues(grid.N2, grid.mu2, grid.h2)
    return SpectralTable(grid, d1x, d2x, d1y, d2y, b1, b2)


@dataclass(frozen=True, eq=False)
class OperatorSymbol:
    """Eigenvalues of a DFT-diagonal operator, ``values[j, k]`` on (N1, N2)."""

    grid: Grid
    tag: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex).reshape(self.grid.shape)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def conjugate_mismatch(self) -> float:
        """max |s[-j, -k] - conj(s[j, k])|; zero for real operators."""
        v = self.values
        flipped = np.roll(v[::-1, ::-1], 1, axis=(0, 1))
        return float(np.max(np.abs(flipped - np.conj(v))))


def _spectrum(U: MeshFunction) -> np.ndarray:
    return np.fft.fft2(U.matrix)


def apply_symbol(sym: OperatorSymbol, U: MeshFunction) -> MeshFunction:
    """Real part of ``ifft2(sym * fft2(U))``.

    The imaginary residue is measured against ``max|sym| * max|U|`` (the result
    itself may legitimately vanish); above ``IMAG_RESIDUE_TOL`` it raises.
    """
    if sym.grid != U.grid:
        raise ValueError("symbol and mesh function live on different grids")
    out = np.fft.ifft2(sym.values * _spectrum(U))
    scale = float(np.max(np.abs(sym.values))) * float(np.max(np.abs(U.values)))
    residue = float(np.max(np.abs(out.imag)))
    if residue > IMAG_RESIDUE_TOL * max(scale, np.finfo(float).tiny):
        raise SymbolError(f"symbol {sym.tag!r} left imaginary residue {residue:.3e} (scale {scale:.3e})")
    return MeshFunction.from_matrix(U.grid, out.real)


def _outer_sum(ax, ay):
    return ax[:, None] + ay[None, :]


def symbol_A(table: SpectralTable) -> OperatorSymbol:
    """Spectral Laplacian."""
    return OperatorSymbol(table.grid, "A", _outer_sum(table.lam_d2x, table.lam_d2y))


def symbol_A2(table: SpectralTable) -> OperatorSymbol:
    a = _outer_sum(table.lam_d2x, table.lam_d2y)
    return OperatorSymbol(table.grid, "A2", a * a)


def symbol_B(table: SpectralTable) -> OperatorSymbol:
    """Spectral Delta d/dx; the third derivative is D1 * D2 so Nyquist stays zero."""
    a = _outer_sum(table.lam_d2x, table.lam_d2y)
    return OperatorSymbol(table.grid, "B", table.lam_d1x[:, None] * a)


def symbol_Lh(table: SpectralTable) -> OperatorSymbol:
    return OperatorSymbol(table.grid, "Lh", _outer_sum(table.lam_d1x, table.lam_d1y))


def apply_D(Uhat: MeshFunction, V: MeshFunction, p: int) -> MeshFunction:
    """Skew-symmetric operator of the semi-discrete system applied to V.

    ``D(Uhat) V = B V + Lh V + (w * Lh V + Lh (w * V)) / (p + 2)`` with
    ``w = Uhat**p`` elementwise.
    """
    _same_grid(Uhat, V)
    if p < 1 or int(p) != p:
        raise ValueError(f"p must be a positive integer, got {p!r}")
    table = build_tables(V.grid)
    lh = symbol_Lh(table).values
    b = symbol_B(table).values
    w = Uhat.matrix.copy()
    for _ in range(int(p) - 1):
        w = w * Uhat.matrix
    v = V.matrix
    v_hat = np.fft.fft2(v)
    lin = np.fft.ifft2((b + lh) * v_hat).real
    lv = np.fft.ifft2(lh * v_hat).real
    lwv = np.fft.ifft2(lh * np.fft.fft2(w * v)).real
    return MeshFunction.from_matrix(V.grid, lin + (w * lv + lwv) / (p + 2))


def seminorm_1h(U: MeshFunction) -> float:
    t = build_tables(U.grid)
    weight = np.abs(t.lam_d1x[:, None]) ** 2 + np.abs(t.lam_d1y[None, :]) ** 2
    u_hat = _spectrum(U)
    return math.sqrt(U.grid.cell * float(np.sum(weight * np.abs(u_hat) ** 2)) / U.grid.size)


def seminorm_2h(U: MeshFunction) -> float:
    return norm_h(apply_symbol(symbol_A(build_tables(U.grid)), U))


def norm_Lh(U: MeshFunction) -> float:
    return norm_h(apply_symbol(symbol_Lh(build_tables(U.grid)), U))


# --- dense test oracle ------------------------------------------------------


def dft_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix, F[j, k] = exp(-2 pi i j k / n) / sqrt(n)."""
    j = np.arange(n)
    return np.exp(-2j * math.pi * np.outer(j, j) / n) / math.sqrt(n)


def _dense_axis(lam: np.ndarray) -> np.ndarray:
    F = dft_matrix(lam.size)
    return (F.conj().T @ np.diag(lam) @ F).real


def dense_oracle(grid: Grid, operator_tag: str) -> np.ndarray:
    """Explicit matrix acting on column-stacked mesh-function values.

    Tags: ``I, D1x, D2x, D3x, D1y, D2y, B1, B2, A, A2, B, Lh, FDLap``. Axis
    matrices are built as F^H diag(lambda) F and lifted with Kronecker
    products (``I_N2 (x) Mx`` and ``My (x) I_N1``). Meant for tests only.
    """
    if grid.size > DENSE_MAX_POINTS:
        raise ValueError(f"dense oracle limited to {DENSE_MAX_POINTS} points, grid has {grid.size}")
    t = build_tables(grid)
    Ix, Iy = np.eye(grid.N1), np.eye(grid.N2)
    axis = {
        "D1x": _dense_axis(t.lam_d1x),
        "D2x": _dense_axis(t.lam_d2x),
        "D1y": _dense_axis(t.lam_d1y),
        "D2y": _dense_axis(t.lam_d2y),
        "B1": _dense_axis(t.lam_b1),
        "B2": _dense_axis(t.lam_b2),
    }
    axis["D3x"] = axis["D1x"] @ axis["D2x"]

    def lift_x(M):
        return np.kron(Iy, M)

    def lift_y(M):
        return np.kron(M, Ix)

    tag = operator_tag
    if tag == "I":
        return np.eye(grid.size)
    if tag in ("D1x", "D2x", "D3x", "B1"):
        return lift_x(axis[tag])
    if tag in ("D1y", "D2y", "B2"):
        return lift_y(axis[tag])
    if tag == "A":
        return lift_x(axis["D2x"]) + lift_y(axis["D2y"])
    if tag == "A2":
        # expanded Kronecker form, independent of squaring the dense A
        return (
            lift_x(axis["D2x"] @ axis["D2x"])
            + 2 * np.kron(axis["D2y"], axis["D2x"])
            + lift_y(axis["D2y"] @ axis["D2y"])
        )
    if tag == "B":
        return lift_x(axis["D3x"]) + np.kron(axis["D2y"], axis["D1x"])
    if tag == "Lh":
        return lift_x(axis["D1x"]) + lift_y(axis["D1y"])
    if tag == "FDLap":
        return lift_x(axis["B1"]) + lift_y(axis["B2"])
    raise ValueError(f"unknown operator tag {operator_tag!r}")
