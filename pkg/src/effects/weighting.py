"""
Inverse-probability-weighted comparators: IPW and AIPW for the ATE and the
IPW quantile estimator of the QTET.
"""

import logging

import numpy as np
from numpy.typing import NDArray

from src.counterfactual.cdf import CounterfactualCdf, quantile
from src.effects.models import (
    EffectReport,
    Estimand,
    EstimationError,
    PropensityModel,
    check_probs,
    data_level,
)
from src.effects.regression import fit_outcome_model
from src.model.dataset import Dataset
from src.model.features import FeatureMap

logger = logging.getLogger(__name__)


def _check_contrast(data: Dataset, prop: PropensityModel, treated: int) -> None:
    if prop.treated != treated:
        raise EstimationError(
            f"Propensity model is for level {data.labels[prop.treated - 1]!r}, "
            f"not the requested treated level {data.labels[treated - 1]!r}",
            {"propensity_treated": prop.treated, "treated": treated},
        )


def _arm_weights(
    data: Dataset, prop: PropensityModel, treated: int, control: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    _check_contrast(data, prop, treated)
    a = data.a[prop.rows]
    pi = prop.probabilities
    w1 = (a == treated) / pi
    w0 = (a == control) / (1.0 - pi)
    return w1, w0, data.y[prop.rows]


def hajek_weights(
    data: Dataset, prop: PropensityModel, treated: int | str, control: int | str
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Self-normalized arm weights over the propensity rows; each sums to one.

    Raises:
        EstimationError: when prop was fitted for another treated level or an
                         arm's weights sum to zero
    """
    t, c = data_level(data, treated), data_level(data, control)
    w1, w0, _ = _arm_weights(data, prop, t, c)
    s1, s0 = w1.sum(), w0.sum()
    if not (s1 > 0 and s0 > 0):
        raise EstimationError("An arm has zero total inverse-probability weight")
    return w1 / s1, w0 / s0


def ipw_ate(
    data: Dataset,
    prop: PropensityModel,
    treated: int | str,
    control: int | str,
    normalized: bool = True,
) -> float:
    """
    IPW estimate of the ATE.

    Hajek (normalized=True): sum w1 y / sum w1 - sum w0 y / sum w0.
    Horvitz-Thompson (normalized=False): mean of w1 y - w0 y.
    """
    t, c = data_level(data, treated), data_level(data, control)
    if t == c:
        return 0.0
    if normalized:
        h1, h0 = hajek_weights(data, prop, t, c)
        y = data.y[prop.rows]
        return float(h1 @ y - h0 @ y)
    w1, w0, y = _arm_weights(data, prop, t, c)
    return float(np.mean(w1 * y - w0 * y))


def aipw_ate(
    data: Dataset,
    prop: PropensityModel,
    features: FeatureMap | None,
    treated: int | str,
    control: int | str,
    outcome_predictions: tuple[NDArray[np.float64], NDArray[np.float64]] | None = None,
) -> float:
    """
    Augmented IPW estimate of the ATE.

    Args:
        outcome_predictions: (m_treated, m_control) at the propensity rows;
                             when omitted, per-arm OLS models are fitted
    """
    t, c = data_level(data, treated), data_level(data, control)
    if t == c:
        return 0.0
    x = data.x[prop.rows]
    if outcome_predictions is None:
        m1 = fit_outcome_model(data, features, t).predict(x)
        m0 = fit_outcome_model(data, features, c).predict(x)
    else:
        m1, m0 = (np.asarray(v, dtype=float) for v in outcome_predictions)
    w1, w0, y = _arm_weights(data, prop, t, c)
    terms = m1 - m0 + w1 * (y - m1) - w0 * (y - m0)
    return float(np.mean(terms))


def ipw_qtet(
    data: Dataset,
    prop: PropensityModel,
    treated: int | str,
    control: int | str,
    probs: tuple[float, ...] | list[float],
) -> EffectReport:
    """
    IPW quantile treatment effect on the treated.

    The treated law is the empirical CDF of treated outcomes; the control law
    reweights control outcomes by pi / (1 - pi).

    Raises:
        EstimationError: on missing treated units or degenerate weights,
                         or when prop was fitted for another treated level
    """
    levels = check_probs(probs)
    t, c = data_level(data, treated), data_level(data, control)
    tags = (data.labels[t - 1], data.labels[c - 1])
    if t == c:
        return EffectReport(Estimand.QTET, "IPW", (0.0,) * len(levels), *tags, probs=levels)
    _check_contrast(data, prop, t)

    a = data.a[prop.rows]
    y = data.y[prop.rows]
    pi = prop.probabilities
    treated_rows = a == t
    control_rows = a == c
    if not treated_rows.any():
        raise EstimationError("QTET needs at least one treated unit")
    odds = pi[control_rows] / (1.0 - pi[control_rows])
    if odds.size == 0 or not np.all(np.isfinite(odds)) or not odds.sum() > 0:
        raise EstimationError("Control reweighting is degenerate")

    f1 = CounterfactualCdf.empirical(y[treated_rows], t, {"subpopulation": "treated"})
    f0 = CounterfactualCdf.from_weighted_atoms(
        y[control_rows], odds, c, {"subpopulation": "treated"}, normalize=True
    )
    values = tuple(quantile(f1, p) - quantile(f0, p) for p in levels)
    return EffectReport(Estimand.QTET, "IPW", values, *tags, probs=levels)
