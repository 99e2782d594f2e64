"""Selects numba-compiled or pure-numpy kernels.

Set ``RKDV_DISABLE_NUMBA=1`` before importing :mod:`rkdv` to run every
kernel as ordinary Python/numpy code. The compiled path needs both numba and
rocket-fft (which teaches numba about ``np.fft``); if either is missing the
numpy path is used silently.
"""

import os

_disabled = os.environ.get("RKDV_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

USE_NUMBA = False
if not _disabled:
    try:
        import numba
        import rocket_fft  # noqa: F401  registers np.fft overloads with numba

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False


def jit(func):
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


BACKEND = "numba" if USE_NUMBA else "numpy"
