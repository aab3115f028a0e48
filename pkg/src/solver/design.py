"""
Exponent bookkeeping shared by the inner and outer solvers.

Every observation (k, j) tilts every atom r by E[kj, r] = beta_kj^T q~(y_r).
The full n x n exponent matrix is never held at once; rows are processed
in fixed blocks so reductions run in the same order on every call.
"""

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from src.model.dataset import Dataset
from src.model.params import ThetaParams
from src.model.spec import ModelSpec

BLOCK_ROWS = 1024


@dataclass(frozen=True, eq=False)
class TiltDesign:
    """Centred basis at the atoms plus per-observation features and levels."""

    q: NDArray[np.float64]
    phi: NDArray[np.float64]
    level: NDArray[np.int64]
    groups: tuple[NDArray[np.int64], ...]

    @classmethod
    def build(cls, data: Dataset, spec: ModelSpec) -> "TiltDesign":
        data.check_against(spec)
        q = spec.basis.evaluate(data.y) - spec.center_vector()
        phi = spec.features.design(data.x)
        return cls(q=q, phi=phi, level=data.a - 1, groups=data.groups)

    @property
    def n(self) -> int:
        return int(self.q.shape[0])

    def betas(self, theta: ThetaParams) -> NDArray[np.float64]:
        """beta(x_i; theta_{a_i}) for every observation, (n, d)."""
        stacked = theta.stacked()
        out = np.empty((self.n, stacked.shape[2]))
        for k, idx in enumerate(self.groups):
            out[idx] = self.phi[idx] @ stacked[k]
        return out

    def own_exponents(self, betas: NDArray[np.float64]) -> NDArray[np.float64]:
        """beta_kj^T q~(y_kj): each observation's tilt at its own outcome."""
        return np.einsum("id,id->i", betas, self.q)

    def _blocks(self, rows: int) -> Iterator[slice]:
        for start in range(0, rows, BLOCK_ROWS):
            yield slice(start, min(start + BLOCK_ROWS, rows))

    def row_logsumexp(
        self, betas: NDArray[np.float64], log_w: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        """log sum_r w_r exp{beta_i^T q~_r} for every row of betas."""
        out = np.empty(betas.shape[0])
        for blk in self._blocks(betas.shape[0]):
            out[blk] = logsumexp(betas[blk] @ self.q.T + log_w, axis=1)
        return out

    def column_logsumexp(
        self, betas: NDArray[np.float64], alpha: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        """log sum_i exp{alpha_i + beta_i^T q~_r} for every atom r."""
        total = np.full(self.n, -np.inf)
        for blk in self._blocks(betas.shape[0]):
            part = logsumexp(alpha[blk, None] + betas[blk] @ self.q.T, axis=0)
            total = np.logaddexp(total, part)
        return total

    def tilted_moments(
        self,
        betas: NDArray[np.float64],
        alpha: NDArray[np.float64],
        log_p: NDArray[np.float64],
    ) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """
        Mass and q-mean of each row's tilted law.

        Returns:
            (mass, mean): mass_i = sum_r p_r exp{alpha_i + E[i, r]} and
            mean_i = sum_r q~_r p_r exp{alpha_i + E[i, r]}
        """
        mass = np.empty(betas.shape[0])
        mean = np.empty((betas.shape[0], self.q.shape[1]))
        for blk in self._blocks(betas.shape[0]):
            w = np.exp(alpha[blk, None] + betas[blk] @ self.q.T + log_p)
            mass[blk] = w.sum(axis=1)
            mean[blk] = w @ self.q
        return mass, mean

    def score(
        self, conditional_mean: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        """Per-level sum of phi_kj (q~_kj - E_k[q~ | x_kj])^T, shape (K, m, d)."""
        resid = self.q - conditional_mean
        return np.stack([self.phi[idx].T @ resid[idx] for idx in self.groups])
