"""
Empirical-likelihood solver for the density ratio model.

This package holds the inner solves for the baseline weights, the marginal
DRM approximation, the profile log-EL with its score, and the outer BFGS
ascent that produces the maximum EL estimate.
"""

from .config import Algorithm, SolverConfig
from .inner import (
    inner_solve_iterative,
    newton_lambda,
    solve_lambda,
    update_alpha,
    update_p,
)
from .marginal import fit_marginal_drm, marginal_denominator
from .mele import fit_mele, reference_center, resolve_spec
from .objective import profile_logel, score
from .quasi_newton import AscentResult, maximize
from .state import InnerState, MarginalDrm, SolverError

__all__ = [
    "Algorithm",
    "AscentResult",
    "InnerState",
    "MarginalDrm",
    "SolverConfig",
    "SolverError",
    "fit_marginal_drm",
    "fit_mele",
    "inner_solve_iterative",
    "marginal_denominator",
    "maximize",
    "newton_lambda",
    "profile_logel",
    "reference_center",
    "resolve_spec",
    "score",
    "solve_lambda",
    "update_alpha",
    "update_p",
]
