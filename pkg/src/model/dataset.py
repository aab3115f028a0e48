"""
Observation container partitioned into treatment groups.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.model.spec import ModelSpec
from src.utils.errors import DrmError

logger = logging.getLogger(__name__)


class DataValidationError(DrmError):
    """Raised when observations violate the dataset invariants."""

    code = "INVALID_DATA"


def _frozen(values: NDArray[np.generic]) -> NDArray[np.generic]:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Outcomes y, treatment levels a in 1..K and covariates x (n x p).

    labels names each level in order; generated data uses ("0", "1").
    """

    y: NDArray[np.float64]
    a: NDArray[np.int64]
    x: NDArray[np.float64]
    labels: tuple[str, ...] = ()
    groups: tuple[NDArray[np.int64], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=float).reshape(-1)
        a = np.array(self.a).reshape(-1)
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        n = y.shape[0]
        if n == 0:
            raise DataValidationError("Dataset has no observations")
        if a.shape[0] != n or x.shape[0] != n:
            raise DataValidationError(
                f"Length mismatch: y={n}, a={a.shape[0]}, x rows={x.shape[0]}"
            )
        if not np.all(np.isfinite(y)):
            bad = int(np.flatnonzero(~np.isfinite(y))[0])
            raise DataValidationError(f"Non-finite outcome at row {bad}", {"row": bad})
        if not np.all(np.isfinite(x)):
            bad = int(np.argwhere(~np.isfinite(x))[0][0])
            raise DataValidationError(f"Non-finite covariate at row {bad}", {"row": bad})
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise DataValidationError("Treatment levels must be integers")
        a = a.astype(np.int64)

        labels = tuple(str(v) for v in self.labels)
        K = len(labels) if labels else int(a.max())
        if not labels:
            labels = tuple(str(k) for k in range(1, K + 1))
        if a.min() < 1 or a.max() > K:
            raise DataValidationError(f"Treatment levels must lie in 1..{K}")
        groups = tuple(np.flatnonzero(a == k) for k in range(1, K + 1))
        empty = [labels[k] for k, g in enumerate(groups) if g.size == 0]
        if empty:
            raise DataValidationError(
                f"Every treatment group needs at least one unit; empty: {empty}",
                {"empty_levels": empty},
            )

        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "a", _frozen(a))
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "groups", tuple(_frozen(g) for g in groups))

    @classmethod
    def from_arrays(
        cls,
        y: ArrayLike,
        a: ArrayLike,
        x: ArrayLike,
        labels: tuple[str, ...] = (),
    ) -> "Dataset":
        return cls(
            y=np.asarray(y, dtype=float),
            a=np.asarray(a),
            x=np.asarray(x, dtype=float),
            labels=labels,
        )

    @property
    def n(self) -> int:
        return int(self.y.shape[0])

    @property
    def p(self) -> int:
        return int(self.x.shape[1])

    @property
    def K(self) -> int:
        return len(self.groups)

    @property
    def n_k(self) -> tuple[int, ...]:
        return tuple(int(g.size) for g in self.groups)

    def group(self, k: int) -> NDArray[np.int64]:
        """Row indices of level k (1-based)."""
        return self.groups[k - 1]

    def check_against(self, spec: ModelSpec) -> None:
        """
        Validate this dataset for a model spec.

        Raises:
            DataValidationError: when the level count disagrees
            SpecError: when the feature map references missing covariates
            SupportDomainError: when an outcome is outside the basis support
        """
        if self.K != spec.K:
            raise DataValidationError(
                f"Model has K={spec.K} treatment levels, data has K={self.K}"
            )
        spec.features.validate_for(self.p)
        spec.basis.check_support(self.y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.x, other.x)
        )

    __hash__ = None  # type: ignore[assignment]
