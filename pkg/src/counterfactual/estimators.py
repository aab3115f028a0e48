"""
Counterfactual distributions implied by a fitted density ratio model.

The normalizer alpha_k(x) is recomputed at every query point from the fitted
baseline weights, so each conditional law has total mass one at any x.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import logsumexp

from src.counterfactual.cdf import CounterfactualCdf, QueryError
from src.model.dataset import Dataset
from src.model.params import DrmFit

logger = logging.getLogger(__name__)

BLOCK_ROWS = 512


@dataclass(frozen=True)
class Subpopulation:
    """Selects the units a marginal counterfactual law averages over."""

    kind: str
    value: Any = None

    @classmethod
    def all_units(cls) -> "Subpopulation":
        return cls("all")

    @classmethod
    def level(cls, level: int | str) -> "Subpopulation":
        return cls("level", level)

    @classmethod
    def rows(cls, indices: Sequence[int]) -> "Subpopulation":
        return cls("rows", tuple(int(i) for i in indices))

    def resolve(self, fit: DrmFit, data: Dataset) -> tuple[NDArray[np.int64], str]:
        """Row indices of the selected units and a provenance tag."""
        if self.kind == "all":
            return np.arange(data.n), "all units"
        if self.kind == "level":
            k = fit.spec.level_index(self.value)
            return data.group(k), f"units with level {fit.spec.treatment_levels[k - 1]}"
        if self.kind == "rows":
            idx = np.asarray(self.value, dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= data.n):
                raise QueryError("Selected rows fall outside the dataset")
            return idx, f"{idx.size} selected rows"
        raise QueryError(f"Unknown subpopulation kind {self.kind!r}")


def _log_weights(
    fit: DrmFit, x: NDArray[np.float64], k: int
) -> NDArray[np.float64]:
    """Normalized log masses over the atoms for each row of x, (rows, n)."""
    phi = fit.spec.features.design(x)
    betas = phi @ fit.theta_hat.theta[k - 1]
    exponents = betas @ fit.q_tilde().T + np.log(fit.p_hat)
    return exponents - logsumexp(exponents, axis=1, keepdims=True)


def _check_x(fit: DrmFit, x: ArrayLike) -> NDArray[np.float64]:
    row = np.asarray(x, dtype=float).reshape(1, -1)
    if not np.all(np.isfinite(row)):
        raise QueryError("Covariate vector must be finite")
    return row


def conditional_alpha(fit: DrmFit, x: ArrayLike, k: int | str) -> float:
    """alpha_k(x) = -log sum_r p_r exp{beta(x; theta_k)^T q~(y_r)}."""
    level = fit.spec.level_index(k)
    row = _check_x(fit, x)
    beta = fit.spec.features.design(row)[0] @ fit.theta_hat.theta[level - 1]
    return float(-logsumexp(fit.q_tilde() @ beta, b=fit.p_hat))


def conditional_cdf(fit: DrmFit, x: ArrayLike, k: int | str) -> CounterfactualCdf:
    """Law of Y(k) given X = x; duplicate atoms are merged."""
    level = fit.spec.level_index(k)
    row = _check_x(fit, x)
    masses = np.exp(_log_weights(fit, row, level)[0])
    return CounterfactualCdf.from_weighted_atoms(
        fit.atoms, masses, level, {"x": row[0].tolist()}
    )


def mixture_masses(
    fit: DrmFit, x: NDArray[np.float64], k: int
) -> NDArray[np.float64]:
    """Average of the conditional atom masses over the rows of x."""
    total = np.zeros(fit.atoms.shape[0])
    for start in range(0, x.shape[0], BLOCK_ROWS):
        block = x[start : start + BLOCK_ROWS]
        total += np.exp(_log_weights(fit, block, k)).sum(axis=0)
    return total / x.shape[0]


def marginal_counterfactual_cdf(
    fit: DrmFit, data: Dataset, k: int | str, over: Subpopulation
) -> CounterfactualCdf:
    """
    Uniform mixture of conditional laws of Y(k) over a subpopulation.

    Raises:
        QueryError: when the subpopulation is empty
    """
    level = fit.spec.level_index(k)
    idx, tag = over.resolve(fit, data)
    if idx.size == 0:
        raise QueryError(f"Subpopulation '{tag}' is empty")
    masses = mixture_masses(fit, data.x[idx], level)
    return CounterfactualCdf.from_weighted_atoms(
        fit.atoms, masses, level, {"subpopulation": tag, "units": int(idx.size)}
    )


def conditional_mean(fit: DrmFit, x: ArrayLike, k: int | str) -> float:
    """E[Y(k) | X = x] under the fitted law."""
    return conditional_cdf(fit, x, k).mean()


def conditional_means(
    fit: DrmFit, x: ArrayLike, k: int | str
) -> NDArray[np.float64]:
    """E[Y(k) | X = x_i] for every row of x."""
    level = fit.spec.level_index(k)
    rows = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty(rows.shape[0])
    for start in range(0, rows.shape[0], BLOCK_ROWS):
        block = rows[start : start + BLOCK_ROWS]
        out[start : start + block.shape[0]] = (
            np.exp(_log_weights(fit, block, level)) @ fit.atoms
        )
    return out


def log_density_ratio(
    fit: DrmFit, x: ArrayLike, a: int | str, b: int | str, y: float
) -> float:
    """
    log dG_a(y | x) / dG_b(y | x).

    Raises:
        SupportDomainError: when y is outside the basis support
    """
    level_a, level_b = fit.spec.level_index(a), fit.spec.level_index(b)
    row = _check_x(fit, x)
    q_y = fit.spec.basis.evaluate([y])[0] - fit.spec.center_vector()
    phi = fit.spec.features.design(row)[0]
    beta_a = phi @ fit.theta_hat.theta[level_a - 1]
    beta_b = phi @ fit.theta_hat.theta[level_b - 1]
    alpha_gap = conditional_alpha(fit, row[0], level_a) - conditional_alpha(
        fit, row[0], level_b
    )
    return float(alpha_gap + (beta_a - beta_b) @ q_y)
