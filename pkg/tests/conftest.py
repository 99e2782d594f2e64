import math

import numpy as np
import pytest

from rkdv.mesh import MeshFunction, build_grid

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def small_grids():
    """1D and 2D grids with N in {4, 8, 16} on two different box sizes."""
    out = []
    for N in (4, 8, 16):
        out.append(build_grid(1, (0.0, 2 * math.pi), N1=N))
        out.append(build_grid(1, (-1.0, 2.0), N1=N))
        out.append(build_grid(2, (0.0, 2 * math.pi), (0.0, 2 * math.pi), N, N))
        out.append(build_grid(2, (0.0, 1.0), (0.0, 3.0), N, N))
    return out


def random_mesh(grid, rng, scale=1.0):
    return MeshFunction(grid, scale * rng.standard_normal(grid.size))


def smooth_mesh(grid, rng, modes=3, amplitude=0.3):
    """Random real trigonometric polynomial with |k| <= modes on each axis."""
    X, Y = grid.coordinates()
    u = np.zeros(grid.shape)
    ky_max = 0 if grid.dim == 1 else modes
    for kx in range(modes + 1):
        for ky in range(-ky_max, ky_max + 1):
            a, b = rng.standard_normal(2) / (1 + kx * kx + ky * ky)
            phase = kx * grid.mu1 * (X - grid.x_range[0])
            if grid.dim == 2:
                phase = phase + ky * grid.mu2 * (Y - grid.y_range[0])
            u += a * np.cos(phase) + b * np.sin(phase)
    u *= amplitude / max(np.max(np.abs(u)), 1e-300)
    return MeshFunction.from_matrix(grid, u)
