"""
Exponential-tilt normalizer alpha = -log sum_r w_r exp{beta^T q(y_r)}.
"""

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from src.model.basis import BasisSpec
from src.utils.errors import DrmError


class InfeasibleStateError(DrmError):
    """Raised when an exponent sum or denominator leaves its valid domain."""

    code = "INFEASIBLE_STATE"


def compute_alpha(
    basis: BasisSpec,
    weights: ArrayLike,
    beta_vec: ArrayLike,
    atoms: ArrayLike,
    center: ArrayLike | None = None,
) -> float:
    """
    Normalizing constant of the tilt beta over a weighted atom set.

    Args:
        basis: outcome basis q
        weights: positive atom weights summing to one
        beta_vec: tilt vector of length d
        atoms: outcome value of each atom
        center: optional fixed offset subtracted from q

    Returns:
        -log sum_r weights[r] * exp{beta^T (q(y_r) - center)}
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise InfeasibleStateError("Tilt weights must be strictly positive")
    q = basis.evaluate(atoms)
    if center is not None:
        q = q - np.asarray(center, dtype=float)
    exponents = q @ np.asarray(beta_vec, dtype=float)
    total = logsumexp(exponents, b=w)
    if not np.isfinite(total):
        raise InfeasibleStateError("Tilt exponent sum is not finite")
    return float(-total)
