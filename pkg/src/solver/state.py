"""
Inner-solve state and solver failures.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from src.solver.config import Algorithm
from src.utils.errors import DrmError


class SolverError(DrmError):
    """Raised when an inner or outer solve fails to converge."""

    code = "SOLVER_FAILURE"


@dataclass(frozen=True)
class MarginalDrm:
    """Covariate-free DRM fitted to the pooled responses; level 1 is the reference."""

    alpha_bar: NDArray[np.float64]
    beta_bar: NDArray[np.float64]
    iterations: int
    gradient_norm: float


@dataclass(frozen=True, eq=False)
class InnerState:
    """
    Baseline weights p, per-observation normalizers alpha and multiplier lambda.

    residuals holds the constraint residuals of the state:
    sum_p, moment and normalization.
    """

    p: NDArray[np.float64]
    alpha: NDArray[np.float64]
    lam: NDArray[np.float64]
    algorithm: Algorithm
    residuals: dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    marginal: MarginalDrm | None = None

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.p > 0))
