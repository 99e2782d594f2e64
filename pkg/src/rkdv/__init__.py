"""Linearized momentum-preserving Fourier pseudo-spectral solver for the
generalized Rosenau-KdV equation on periodic 1D and 2D domains."""

from ._accel import BACKEND
from .mesh import Grid, MeshFunction, build_grid, inner, norm_h, norm_inf
from .problems import Problem, error_inf, get_problem
from .spectral import SpectralTable, OperatorSymbol, build_tables, apply_symbol, apply_D
from .stepper import (
    NonConvergence,
    NonFinite,
    SchemeConfig,
    SolverError,
    StepState,
    first_step,
    momentum,
    run,
    solve_halfstep,
    step,
)

__version__ = "0.1.0"
