"""
Logistic propensity scores by iteratively reweighted least squares.
"""

import logging

import numpy as np
from scipy.special import expit

from src.effects.models import EstimationError, PropensityModel, data_level
from src.effects.regression import check_rank, comparator_design
from src.model.dataset import Dataset
from src.model.features import FeatureMap

logger = logging.getLogger(__name__)

MAX_ITER = 100
COEF_TOL = 1e-8
SEPARATION_ETA = 20.0


class SeparationError(EstimationError):
    """Raised when the treated indicator is perfectly separated by the covariates."""

    code = "SEPARATION"


def fit_propensity(
    data: Dataset,
    features: FeatureMap | None,
    treated: int | str,
    control: int | str | None = None,
) -> PropensityModel:
    """
    Maximum-likelihood logistic regression of 1{A = treated} on (1, phi(x)).

    With more than two levels and a control level given, the fit uses only
    the units of the two contrasted levels.

    Raises:
        SeparationError: when the linear predictor separates the classes
        RankDeficiencyError: when the design is not full rank
    """
    t = data_level(data, treated)
    if control is not None and data.K > 2:
        c = data_level(data, control)
        rows = np.sort(np.concatenate([data.group(t), data.group(c)]))
    else:
        rows = np.arange(data.n)
    target = (data.a[rows] == t).astype(float)
    if target.min() == target.max():
        raise EstimationError("Propensity fit needs both treated and untreated units")

    design, labels = comparator_design(features, data.x[rows])
    check_rank(design, labels, "Propensity design")

    coef = np.zeros(design.shape[1])
    converged = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        eta = design @ coef
        prob = expit(eta)
        weight = prob * (1.0 - prob)
        hessian = design.T @ (design * weight[:, None])
        try:
            step = np.linalg.solve(hessian, design.T @ (target - prob))
        except np.linalg.LinAlgError as e:
            _raise_if_separated(target, eta)
            raise EstimationError("Propensity information matrix is singular") from e
        coef = coef + step
        _raise_if_separated(target, design @ coef)
        if np.max(np.abs(step)) < COEF_TOL:
            converged = True
            break

    if not converged:
        logger.warning(f"Propensity IRLS stopped after {MAX_ITER} iterations")
    logger.debug(f"Propensity fitted in {it} iterations: {dict(zip(labels, coef, strict=True))}")
    return PropensityModel(
        coefficients=coef,
        probabilities=expit(design @ coef),
        rows=rows,
        treated=t,
        terms=tuple(labels),
        iterations=it,
        converged=converged,
    )


def _raise_if_separated(target: np.ndarray, eta: np.ndarray) -> None:
    separated = np.all(eta[target == 1] > 0) and np.all(eta[target == 0] < 0)
    if separated and np.max(np.abs(eta)) > SEPARATION_ETA:
        raise SeparationError(
            "Treatment is perfectly separated by the propensity covariates",
            {"max_abs_linear_predictor": float(np.max(np.abs(eta)))},
        )
