"""
Data models for causal-effect estimates.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.counterfactual.cdf import QueryError
from src.model.dataset import Dataset
from src.model.spec import resolve_level
from src.utils.errors import DrmError

PROB_CLIP = 1e-6
DEFAULT_PROBS = (0.1, 0.3, 0.5, 0.7, 0.9)


class EstimationError(DrmError):
    """Raised when an effect estimator cannot produce a value."""

    code = "ESTIMATION_FAILURE"


class Estimand(StrEnum):
    ATE = "ATE"
    CATE = "CATE"
    QTET = "QTET"


def data_level(data: Dataset, level: int | str) -> int:
    """Resolve a treatment level against a dataset's labels."""
    return resolve_level(data.labels, level)


def check_probs(probs: tuple[float, ...] | list[float]) -> tuple[float, ...]:
    values = tuple(float(p) for p in probs)
    if not values:
        raise QueryError("At least one probability level is required")
    if any(not 0.0 < p < 1.0 for p in values):
        raise QueryError(f"Probability levels must lie in (0, 1): {values}")
    if any(b <= a for a, b in zip(values, values[1:], strict=False)):
        raise QueryError(f"Probability levels must be strictly increasing: {values}")
    return values


@dataclass
class EffectReport:
    """
    One estimate of ATE, CATE or QTET.

    values holds one entry for ATE, one per covariate point for CATE and one
    per probability level for QTET.
    """

    estimand: Estimand
    estimator: str
    values: tuple[float, ...]
    treated: str
    control: str
    probs: tuple[float, ...] = ()
    points: tuple[tuple[float, ...], ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.estimand = Estimand(self.estimand)
        self.values = tuple(float(v) for v in self.values)
        if self.estimand is Estimand.QTET:
            self.probs = check_probs(self.probs)
            if len(self.values) != len(self.probs):
                raise ValueError("QTET needs one value per probability level")
        elif self.estimand is Estimand.ATE and len(self.values) != 1:
            raise ValueError("ATE reports carry exactly one value")
        elif self.estimand is Estimand.CATE and len(self.values) != len(self.points):
            raise ValueError("CATE needs one value per covariate point")

    @property
    def value(self) -> float:
        return self.values[0]

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "estimand": str(self.estimand),
            "estimator": self.estimator,
            "treated": self.treated,
            "control": self.control,
            "values": list(self.values),
        }
        if self.probs:
            payload["probs"] = list(self.probs)
        if self.points:
            payload["points"] = [list(p) for p in self.points]
        if self.metadata:
            payload["metadata"] = self.metadata
        return payload


@dataclass
class PropensityModel:
    """
    Logistic propensity of the treated level.

    rows are the dataset rows the model was fitted on (all units for two-level
    data) and probabilities are pi_hat at those rows, clipped away from 0 and 1.
    """

    coefficients: NDArray[np.float64]
    probabilities: NDArray[np.float64]
    rows: NDArray[np.int64]
    treated: int
    terms: tuple[str, ...] = ()
    iterations: int = 0
    converged: bool = True

    def __post_init__(self) -> None:
        self.probabilities = np.clip(
            np.asarray(self.probabilities, dtype=float), PROB_CLIP, 1.0 - PROB_CLIP
        )
        self.rows = np.asarray(self.rows, dtype=np.int64)
        if self.probabilities.shape != self.rows.shape:
            raise ValueError("One fitted probability is needed per row")
