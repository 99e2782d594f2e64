import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rkdv.mesh import (
    MeshFunction,
    build_grid,
    fd_diff_backward,
    fd_diff_forward,
    fd_gradient_norm,
    fd_laplacian,
    fd_laplacian_norm,
    inner,
    linf_interpolation_ratio,
    norm_H2,
    norm_h,
    norm_inf,
)

from conftest import random_mesh, small_grids
import oracles


class TestBuildGrid:
    def test_square_2pi(self):
        g = build_grid(2, (0, 2 * math.pi), (0, 2 * math.pi), 8, 8)
        assert g.h1 == pytest.approx(math.pi / 4, rel=1e-15)
        assert g.h2 == pytest.approx(math.pi / 4, rel=1e-15)
        assert g.mu1 == pytest.approx(1.0) and g.mu2 == pytest.approx(1.0)

    def test_soliton_box(self):
        g = build_grid(1, (-50, 50), N1=1024)
        assert g.h1 == 100 / 1024
        assert g.mu1 == pytest.approx(2 * math.pi / 100)
        assert (g.N2, g.h2, g.cell) == (1, 1.0, g.h1)

    def test_unit_square(self):
        g = build_grid(2, (0, 1), (0, 1), 100, 100)
        assert g.mu1 == pytest.approx(2 * math.pi) and g.mu2 == pytest.approx(2 * math.pi)

    def test_points_and_lengths(self):
        g = build_grid(2, (-1, 2), (0.5, 1.5), 6, 4)
        X, Y = g.coordinates()
        assert X.shape == (6, 4)
        np.testing.assert_allclose(X[:, 0], -1 + 0.5 * np.arange(6))
        np.testing.assert_allclose(Y[0], 0.5 + 0.25 * np.arange(4))
        assert g.h1 * g.N1 == pytest.approx(3.0, rel=1e-15)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(dim=1, x_range=(0, 1), N1=7),
            dict(dim=1, x_range=(0, 1), N1=2),
            dict(dim=2, x_range=(0, 1), y_range=(0, 1), N1=8, N2=5),
            dict(dim=1, x_range=(1, 1), N1=8),
            dict(dim=2, x_range=(0, 1), y_range=(2, 1), N1=8, N2=8),
            dict(dim=3, x_range=(0, 1), N1=8),
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            build_grid(**kwargs)


class TestMeshFunction:
    def test_columnwise_layout(self):
        g = build_grid(2, (0, 1), (0, 1), 4, 6)
        M = np.arange(24.0).reshape(4, 6)
        U = MeshFunction.from_matrix(g, M)
        # j1 varies fastest
        np.testing.assert_array_equal(U.values[:4], M[:, 0])
        np.testing.assert_array_equal(U.matrix, M)

    def test_periodic_access(self):
        g = build_grid(2, (0, 1), (0, 1), 4, 4)
        U = MeshFunction.from_matrix(g, np.arange(16.0).reshape(4, 4))
        assert U.at(5, 2) == U.at(1, 2)
        assert U.at(1, 6) == U.at(1, 2)
        assert U.at(-1, -1) == U.at(3, 3)

    def test_immutable(self):
        U = MeshFunction.zeros(build_grid(1, (0, 1), N1=4))
        with pytest.raises(ValueError):
            U.values[0] = 1.0

    def test_rejects_bad_values(self):
        g = build_grid(1, (0, 1), N1=4)
        with pytest.raises(ValueError):
            MeshFunction(g, np.zeros(5))
        with pytest.raises(ValueError):
            MeshFunction(g, [0.0, np.nan, 0.0, 0.0])


class TestInnerAndNorms:
    def test_constant_one(self):
        g = build_grid(2, (0, 2 * math.pi), (0, 2 * math.pi), 8, 8)
        one = MeshFunction(g, np.ones(g.size))
        assert inner(one, one) == pytest.approx(4 * math.pi**2, rel=1e-14)

    def test_sin_cos_orthogonal(self):
        g = build_grid(1, (0, 2 * math.pi), N1=16)
        s = g.sample(lambda x, y: np.sin(x))
        c = g.sample(lambda x, y: np.cos(x))
        assert abs(inner(s, c)) < 1e-14

    def test_double_loop_oracle(self, rng):
        g = build_grid(2, (0, 1), (0, 2), 4, 4)
        U, V = random_mesh(g, rng), random_mesh(g, rng)
        total = 0.0
        for j1 in range(4):
            for j2 in range(4):
                total += U.at(j1, j2) * V.at(j1, j2)
        assert inner(U, V) == pytest.approx(g.h1 * g.h2 * total, rel=1e-14)
        assert norm_h(U) == pytest.approx(math.sqrt(g.cell * sum(U.at(a, b) ** 2 for a in range(4) for b in range(4))))
        assert norm_inf(U) == max(abs(U.at(a, b)) for a in range(4) for b in range(4))

    def test_zero_and_constant(self):
        g = build_grid(2, (0, 2), (0, 3), 8, 8)
        assert norm_h(MeshFunction.zeros(g)) == 0 and norm_inf(MeshFunction.zeros(g)) == 0
        c = MeshFunction(g, np.full(g.size, -2.5))
        assert norm_h(c) == pytest.approx(2.5 * math.sqrt(6.0), rel=1e-14)

    def test_grid_mismatch(self):
        a = MeshFunction.zeros(build_grid(1, (0, 1), N1=4))
        b = MeshFunction.zeros(build_grid(1, (0, 2), N1=4))
        with pytest.raises(ValueError):
            inner(a, b)

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(np.float64, 16, elements=st.floats(-1e3, 1e3)),
        arrays(np.float64, 16, elements=st.floats(-1e3, 1e3)),
        arrays(np.float64, 16, elements=st.floats(-1e3, 1e3)),
        st.floats(-10, 10),
    )
    def test_symmetric_bilinear(self, u, v, w, a):
        g = build_grid(2, (0, 1), (0, 1), 4, 4)
        U, V, W = (MeshFunction(g, x) for x in (u, v, w))
        scale = 1e-12 * (1 + norm_h(U) * (norm_h(V) + norm_h(W)) * (1 + abs(a)))
        assert inner(U, V) == inner(V, U)
        assert abs(inner(U * a + W, V) - (a * inner(U, V) + inner(W, V))) <= scale


class TestDifferences:
    def test_constant_killed(self):
        g = build_grid(2, (0, 1), (0, 1), 8, 8)
        c = MeshFunction(g, np.full(g.size, 3.0))
        for op in (lambda U: fd_diff_forward(U, "x"), lambda U: fd_diff_forward(U, "y"), fd_laplacian):
            assert norm_inf(op(c)) == 0.0

    def test_sawtooth(self):
        N = 8
        g = build_grid(1, (0, 1), N1=N)
        U = g.sample(lambda x, y: x)
        d = fd_diff_forward(U).values
        np.testing.assert_allclose(d[:-1], 1.0, rtol=1e-12)
        assert d[-1] == pytest.approx(-(N - 1), rel=1e-12)

    def test_spike_stencil(self):
        g = build_grid(2, (0, 4), (0, 4), 4, 4)
        e = np.zeros((4, 4))
        e[1, 2] = 1.0
        L = fd_laplacian(MeshFunction.from_matrix(g, e)).matrix
        expected = np.zeros((4, 4))
        expected[1, 2] = -4
        for a, b in ((0, 2), (2, 2), (1, 1), (1, 3)):
            expected[a, b] = 1
        np.testing.assert_array_equal(L, expected)

    def test_inactive_axis(self):
        U = MeshFunction.zeros(build_grid(1, (0, 1), N1=8))
        with pytest.raises(ValueError):
            fd_diff_forward(U, "y")

    @pytest.mark.parametrize("grid", [g for g in small_grids() if g.N1 <= 8], ids=str)
    def test_dense_circulant_agreement(self, grid, rng):
        U = random_mesh(grid, rng)
        Dxp = oracles.lift(grid, Mx=oracles.forward_difference(grid.N1, grid.h1))
        Dxm = oracles.lift(grid, Mx=oracles.backward_difference(grid.N1, grid.h1))
        lap = oracles.lift(grid, Mx=oracles.second_difference(grid.N1, grid.h1))
        lap = lap + oracles.lift(grid, My=oracles.second_difference(grid.N2, grid.h2))
        cases = [(fd_diff_forward(U, "x"), Dxp), (fd_diff_backward(U, "x"), Dxm), (fd_laplacian(U), lap)]
        if grid.dim == 2:
            Dyp = oracles.lift(grid, My=oracles.forward_difference(grid.N2, grid.h2))
            cases.append((fd_diff_forward(U, "y"), Dyp))
        for got, M in cases:
            want = M @ U.values
            np.testing.assert_allclose(got.values, want, rtol=1e-12, atol=1e-12 * np.max(np.abs(want)))

    def test_summation_by_parts(self, rng):
        for grid in small_grids():
            U, V = random_mesh(grid, rng), random_mesh(grid, rng)
            for ax in grid.active_axes():
                lhs = inner(fd_diff_forward(U, ax), V)
                rhs = -inner(U, fd_diff_backward(V, ax))
                assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestSemiNorms:
    def test_constant(self):
        g = build_grid(2, (0, 1), (0, 1), 8, 8)
        c = MeshFunction(g, np.full(g.size, 0.7))
        assert fd_gradient_norm(c) == 0 and fd_laplacian_norm(c) == 0
        assert norm_H2(c) == pytest.approx(norm_h(c))

    def test_summation_oracle(self, rng):
        g = build_grid(2, (0, 2), (0, 1), 4, 4)
        U = random_mesh(g, rng)
        M = U.matrix
        grad2 = lap2 = 0.0
        for j1 in range(4):
            for j2 in range(4):
                dx = (M[(j1 + 1) % 4, j2] - M[j1, j2]) / g.h1
                dy = (M[j1, (j2 + 1) % 4] - M[j1, j2]) / g.h2
                lap = (M[(j1 + 1) % 4, j2] - 2 * M[j1, j2] + M[j1 - 1, j2]) / g.h1**2
                lap += (M[j1, (j2 + 1) % 4] - 2 * M[j1, j2] + M[j1, j2 - 1]) / g.h2**2
                grad2 += g.cell * (dx * dx + dy * dy)
                lap2 += g.cell * lap * lap
        assert fd_gradient_norm(U) == pytest.approx(math.sqrt(grad2), rel=1e-13)
        assert fd_laplacian_norm(U) == pytest.approx(math.sqrt(lap2), rel=1e-13)
        assert norm_H2(U) ** 2 == pytest.approx(norm_h(U) ** 2 + grad2 + lap2, rel=1e-13)

    def test_gradient_interpolation_inequality(self, rng):
        for grid in small_grids():
            for _ in range(50):
                U = random_mesh(grid, rng)
                assert fd_gradient_norm(U) ** 2 <= norm_h(U) * fd_laplacian_norm(U) + 1e-12

    def test_linf_ratio_monitored(self, rng):
        # constant is unknown; only check it stays finite and grid-insensitive
        ratios = {}
        for N in (8, 16, 32):
            g = build_grid(2, (0, 1), (0, 1), N, N)
            ratios[N] = max(linf_interpolation_ratio(random_mesh(g, rng)) for _ in range(50))
        assert all(np.isfinite(list(ratios.values())))
        assert max(ratios.values()) < 10 * min(ratios.values())
