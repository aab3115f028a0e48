"""
Causal effects read off a fitted density ratio model.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike

from src.counterfactual.cdf import quantile
from src.counterfactual.estimators import (
    Subpopulation,
    conditional_mean,
    conditional_means,
    marginal_counterfactual_cdf,
)
from src.effects.models import EffectReport, Estimand, EstimationError, check_probs
from src.model.dataset import Dataset
from src.model.params import DrmFit

logger = logging.getLogger(__name__)


def _labels(fit: DrmFit, treated: int | str, control: int | str) -> tuple[int, int]:
    return fit.spec.level_index(treated), fit.spec.level_index(control)


def drm_cate(fit: DrmFit, x: ArrayLike, treated: int | str, control: int | str) -> float:
    """E[Y(treated) - Y(control) | X = x]."""
    t, c = _labels(fit, treated, control)
    if t == c:
        return 0.0
    return conditional_mean(fit, x, t) - conditional_mean(fit, x, c)


def drm_cate_report(
    fit: DrmFit, points: ArrayLike, treated: int | str, control: int | str
) -> EffectReport:
    """CATE at each row of points."""
    t, c = _labels(fit, treated, control)
    rows = np.atleast_2d(np.asarray(points, dtype=float))
    if t == c:
        values = np.zeros(rows.shape[0])
    else:
        values = conditional_means(fit, rows, t) - conditional_means(fit, rows, c)
    levels = fit.spec.treatment_levels
    return EffectReport(
        Estimand.CATE,
        "DRM",
        tuple(values),
        levels[t - 1],
        levels[c - 1],
        points=tuple(tuple(r) for r in rows.tolist()),
    )


def drm_ate(fit: DrmFit, data: Dataset, treated: int | str, control: int | str) -> float:
    """CATE averaged over the covariates of all n units."""
    t, c = _labels(fit, treated, control)
    if t == c:
        return 0.0
    gaps = conditional_means(fit, data.x, t) - conditional_means(fit, data.x, c)
    return float(np.mean(gaps))


def drm_qtet(
    fit: DrmFit,
    data: Dataset,
    treated: int | str,
    control: int | str,
    probs: tuple[float, ...] | list[float],
) -> EffectReport:
    """
    Quantile effect on the treated: both counterfactual laws mix the
    conditional laws over the treated units' covariates.

    Raises:
        EstimationError: when there are no treated units
    """
    levels = check_probs(probs)
    t, c = _labels(fit, treated, control)
    names = fit.spec.treatment_levels
    if t == c:
        values: tuple[float, ...] = (0.0,) * len(levels)
    else:
        if data.group(t).size == 0:
            raise EstimationError("QTET needs at least one treated unit")
        over = Subpopulation.level(t)
        f1 = marginal_counterfactual_cdf(fit, data, t, over)
        f0 = marginal_counterfactual_cdf(fit, data, c, over)
        values = tuple(quantile(f1, p) - quantile(f0, p) for p in levels)
    return EffectReport(
        Estimand.QTET, "DRM", values, names[t - 1], names[c - 1], probs=levels
    )
