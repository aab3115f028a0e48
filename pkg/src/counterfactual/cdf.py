"""
Step-function counterfactual CDFs.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.utils.errors import DrmError

MASS_TOL = 1e-8


class QueryError(DrmError):
    """Raised for out-of-range distribution queries."""

    code = "INVALID_QUERY"


@dataclass(frozen=True, eq=False)
class CounterfactualCdf:
    """
    Discrete law on strictly increasing atoms.

    level is the treatment level (1-based) and condition describes what the
    law conditions on: {"x": [...]} for a covariate vector or
    {"subpopulation": "..."} for a mixture over units.
    """

    atoms: NDArray[np.float64]
    masses: NDArray[np.float64]
    level: int
    condition: dict[str, Any] = field(default_factory=dict)
    cumulative: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=float)
        masses = np.array(self.masses, dtype=float)
        if atoms.ndim != 1 or atoms.shape != masses.shape or atoms.size == 0:
            raise ValueError("atoms and masses must be equal-length non-empty vectors")
        if np.any(np.diff(atoms) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(masses < 0):
            raise ValueError("masses must be nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {masses.sum():.12g}, expected 1")
        cumulative = np.cumsum(masses)
        for values in (atoms, masses, cumulative):
            values.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "cumulative", cumulative)

    @classmethod
    def from_weighted_atoms(
        cls,
        y: ArrayLike,
        weights: ArrayLike,
        level: int,
        condition: dict[str, Any] | None = None,
        normalize: bool = False,
    ) -> "CounterfactualCdf":
        """Build a CDF from possibly repeated atoms, merging duplicates."""
        values = np.asarray(y, dtype=float).reshape(-1)
        w = np.asarray(weights, dtype=float).reshape(-1)
        atoms, inverse = np.unique(values, return_inverse=True)
        masses = np.bincount(inverse.reshape(-1), weights=w, minlength=atoms.size)
        if normalize:
            total = masses.sum()
            if not total > 0:
                raise ValueError("weights must have a positive total")
            masses = masses / total
        return cls(atoms=atoms, masses=masses, level=level, condition=condition or {})

    @classmethod
    def empirical(
        cls, y: ArrayLike, level: int, condition: dict[str, Any] | None = None
    ) -> "CounterfactualCdf":
        values = np.asarray(y, dtype=float).reshape(-1)
        return cls.from_weighted_atoms(
            values, np.ones(values.size), level, condition, normalize=True
        )

    def evaluate(self, y: ArrayLike) -> NDArray[np.float64]:
        """Right-continuous F(y)."""
        pos = np.searchsorted(self.atoms, np.asarray(y, dtype=float), side="right")
        padded = np.concatenate([[0.0], self.cumulative])
        return np.asarray(padded[pos])

    def mean(self) -> float:
        return float(self.atoms @ self.masses)

    def to_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "condition": self.condition,
            "n_atoms": int(self.atoms.size),
        }


def quantile(cdf: CounterfactualCdf, prob: float) -> float:
    """
    Left-continuous generalized inverse inf{y : F(y) >= prob}.

    Raises:
        QueryError: when prob is outside (0, 1)
    """
    if not 0.0 < prob < 1.0:
        raise QueryError(f"Quantile level must lie in (0, 1), got {prob}")
    idx = int(np.searchsorted(cdf.cumulative, prob, side="left"))
    return float(cdf.atoms[min(idx, cdf.atoms.size - 1)])


def weighted_quantile(
    y: ArrayLike, weights: ArrayLike, prob: float
) -> float:
    """Generalized-inverse quantile of a weighted sample."""
    cdf = CounterfactualCdf.from_weighted_atoms(y, weights, level=0, normalize=True)
    return quantile(cdf, prob)
