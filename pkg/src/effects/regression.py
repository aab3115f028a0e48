"""
Outcome regression and the G-formula ATE.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import qr

from src.effects.models import EstimationError, data_level
from src.model.dataset import Dataset
from src.model.features import FeatureMap

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10


class RankDeficiencyError(EstimationError):
    """Raised when a design matrix has collinear columns."""

    code = "RANK_DEFICIENT"


def comparator_design(
    features: FeatureMap | None, x: NDArray[np.float64]
) -> tuple[NDArray[np.float64], list[str]]:
    """Intercept plus phi(x); an intercept term in the map is not duplicated."""
    rest = features.without_intercept() if features is not None else None
    columns = [np.ones(x.shape[0])]
    labels = ["1"]
    if rest is not None:
        columns.append(rest.design(x))
        labels.extend(rest.labels)
    return np.column_stack(columns), labels


def check_rank(design: NDArray[np.float64], labels: list[str], context: str) -> None:
    """
    Raise when design is rank deficient, naming the collinear terms.

    Raises:
        RankDeficiencyError: listing the columns dropped by a pivoted QR
    """
    if design.shape[0] < design.shape[1]:
        raise RankDeficiencyError(
            f"{context}: {design.shape[0]} rows for {design.shape[1]} terms",
            {"terms": labels},
        )
    _, r, pivots = qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL * max(diag[0], 1.0)))
    if rank < design.shape[1]:
        collinear = [labels[i] for i in pivots[rank:]]
        raise RankDeficiencyError(
            f"{context}: collinear terms {collinear}", {"collinear_terms": collinear}
        )


@dataclass
class OutcomeModel:
    """OLS fit of y on intercept plus phi(x) within one arm."""

    coefficients: NDArray[np.float64]
    features: FeatureMap | None
    level: int

    def predict(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        design, _ = comparator_design(self.features, x)
        return np.asarray(design @ self.coefficients)


def fit_outcome_model(
    data: Dataset, features: FeatureMap | None, level: int | str
) -> OutcomeModel:
    """
    Least squares of y on (1, phi(x)) over the units of one level.

    Raises:
        RankDeficiencyError: when the arm's design is not full rank
    """
    k = data_level(data, level)
    rows = data.group(k)
    design, labels = comparator_design(features, data.x[rows])
    check_rank(design, labels, f"Outcome model for level {data.labels[k - 1]}")
    coefficients, *_ = np.linalg.lstsq(design, data.y[rows], rcond=None)
    return OutcomeModel(coefficients=coefficients, features=features, level=k)


def gformula_ate(
    data: Dataset,
    features: FeatureMap | None,
    treated: int | str,
    control: int | str,
) -> float:
    """Mean over all units of m_treated(x_i) - m_control(x_i)."""
    t, c = data_level(data, treated), data_level(data, control)
    if t == c:
        return 0.0
    m_t = fit_outcome_model(data, features, t)
    m_c = fit_outcome_model(data, features, c)
    return float(np.mean(m_t.predict(data.x) - m_c.predict(data.x)))
