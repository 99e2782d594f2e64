"""Hot loops of the LCN-MP integrator.

Everything here works on 2D ``(N1, N2)`` arrays (1D problems use ``N2 == 1``)
and precomputed Fourier symbols of the same shape. The functions are written
so that the identical source runs under numba or plain numpy; see
:mod:`rkdv._accel`.

Status codes returned by the loops: 0 converged, 1 iteration cap reached,
2 non-finite iterate.
"""

import numpy as np

from ._accel import jit

OK = 0
NOT_CONVERGED = 1
NON_FINITE = 2


@jit
def int_power(u, p):
    out = u.copy()
    for _ in range(p - 1):
        out = out * u
    return out


@jit
def halfstep(u0, w, rhs_hat, m, lh, c, tol, max_iter):
    """Fixed-point sweeps for the half-step value.

    Each sweep lags the skew nonlinear product and solves the constant part
    by dividing by ``m`` in Fourier space:
    ``m * hat(U_new) = rhs_hat - c * hat(w*Lh U + Lh(w*U))``.
    Returns ``(U, sweeps, last_difference, status)``.
    """
    u = u0.copy()
    u_hat = np.fft.fft2(u)
    diff = np.inf
    for it in range(1, max_iter + 1):
        lu = np.fft.ifft2(lh * u_hat).real
        nl_hat = np.fft.fft2(w * lu) + lh * np.fft.fft2(w * u)
        new_hat = (rhs_hat - c * nl_hat) / m
        new = np.fft.ifft2(new_hat).real
        diff = np.max(np.abs(new - u))
        u = new
        u_hat = new_hat
        if not np.isfinite(diff):
            return u, it, diff, NON_FINITE
        if diff < tol:
            return u, it, diff, OK
    return u, max_iter, diff, NOT_CONVERGED


@jit
def momentum(u, a_sym, cell):
    """||U||_h^2 + |U|_{2,h}^2, the second term by Parseval."""
    u_hat = np.fft.fft2(u)
    n = u.size
    return cell * (np.sum(u * u) + np.sum(np.abs(a_sym * u_hat) ** 2) / n)


@jit
def advance(u_prev, u_curr, n_steps, sources, forced, m, a2p1, lh, a_sym, tau, p, tol, max_iter, cell):
    """Run ``n_steps`` extrapolated three-level steps.

    When ``forced``, ``sources[k]`` holds the forcing sampled at the k-th
    step's half time; otherwise ``sources`` is an unused placeholder. Stops early on failure; ``done`` reports how
    many steps completed.
    """
    iters = np.zeros(n_steps, dtype=np.int64)
    resid = np.zeros(n_steps)
    moms = np.zeros(n_steps)
    c = tau / (2.0 * (p + 2))
    status = OK
    done = 0
    for k in range(n_steps):
        u_ext = 1.5 * u_curr - 0.5 * u_prev
        w = int_power(u_ext, p)
        rhs_hat = a2p1 * np.fft.fft2(u_curr)
        if forced:
            rhs_hat = rhs_hat + (0.5 * tau) * np.fft.fft2(sources[k])
        half, it, diff, status = halfstep(u_curr, w, rhs_hat, m, lh, c, tol, max_iter)
        iters[k] = it
        resid[k] = diff
        if status != OK:
            break
        u_next = 2.0 * half - u_curr
        u_prev = u_curr
        u_curr = u_next
        moms[k] = momentum(u_curr, a_sym, cell)
        done = k + 1
    return u_prev, u_curr, iters, resid, moms, done, status
