"""
Profile log empirical likelihood and its score in theta.
"""

import numpy as np
from numpy.typing import NDArray

from src.model.dataset import Dataset
from src.model.params import ThetaParams
from src.model.spec import ModelSpec
from src.model.tilt import InfeasibleStateError
from src.solver.config import Algorithm
from src.solver.design import TiltDesign
from src.solver.inner import alpha_for_weights
from src.solver.state import InnerState


def profile_logel(
    theta: ThetaParams,
    state: InnerState,
    data: Dataset,
    spec: ModelSpec,
    refresh_alpha: bool | None = None,
) -> float:
    """
    Evaluate the profile log-EL at theta.

    The head term is sum_kj (alpha_kj + beta_kj^T q~_kj). Under the iterative
    algorithm the tail is -sum_r log(sum_kj exp{alpha_kj + beta_kj^T q~_r} +
    lambda^T q~_r); under marginal-approx the bracket is replaced by 1/p^mar,
    giving sum_r log p_r.

    Args:
        refresh_alpha: recompute alpha from state.p at theta; defaults to True
                       for marginal-approx states and False otherwise

    Raises:
        InfeasibleStateError: when a log argument is not positive
    """
    design = TiltDesign.build(data, spec)
    return logel_value(design, design.betas(theta), state, refresh_alpha)


def logel_value(
    design: TiltDesign,
    betas: NDArray[np.float64],
    state: InnerState,
    refresh_alpha: bool | None = None,
) -> float:
    marginal = state.algorithm is Algorithm.MARGINAL_APPROX
    refresh = marginal if refresh_alpha is None else refresh_alpha
    alpha = alpha_for_weights(design, betas, state.p) if refresh else state.alpha
    head = float(np.sum(alpha + design.own_exponents(betas)))
    if marginal:
        return head + float(np.sum(np.log(state.p)))

    denom = np.exp(design.column_logsumexp(betas, alpha)) + design.q @ state.lam
    if not np.all(denom > 0):
        raise InfeasibleStateError("Profile log-EL has a nonpositive log argument")
    return head - float(np.sum(np.log(denom)))


def score(
    theta: ThetaParams,
    state: InnerState,
    data: Dataset,
    spec: ModelSpec,
) -> NDArray[np.float64]:
    """
    Gradient of the profile log-EL, one m x d block per level: shape (K, m, d).

    Block k is sum_j phi(x_kj) (q~(y_kj) - E_k[q~ | x_kj])^T, where the
    conditional mean uses state.p with alpha recomputed at theta.
    """
    design = TiltDesign.build(data, spec)
    return score_blocks(design, design.betas(theta), state.p)


def score_blocks(
    design: TiltDesign, betas: NDArray[np.float64], p: NDArray[np.float64]
) -> NDArray[np.float64]:
    alpha = alpha_for_weights(design, betas, p)
    mass, mean = design.tilted_moments(betas, alpha, np.log(p))
    return design.score(mean / mass[:, None])
