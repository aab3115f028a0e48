"""
Covariate-free density ratio model fitted to the pooled responses.

Level 1 is the reference (alpha_bar_1 = 0, beta_bar_1 = 0). The remaining
(alpha_bar_k, beta_bar_k) maximize the dual

    sum_{k>=2, j} (alpha_bar_k + beta_bar_k^T q~_kj)
        - sum_r log(sum_k n_k exp{alpha_bar_k + beta_bar_k^T q~_r} + lambda^T q~_r)

with lambda profiled out by the multiplier Newton solve. The resulting
weights stand in for the baseline weights of the conditional model.
"""

import logging

import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

from src.model.dataset import Dataset
from src.model.params import ThetaParams
from src.model.spec import ModelSpec
from src.model.tilt import InfeasibleStateError
from src.solver.config import Algorithm, SolverConfig
from src.solver.design import TiltDesign
from src.solver.inner import (
    alpha_for_weights,
    constraint_residuals,
    newton_lambda,
)
from src.solver.quasi_newton import maximize
from src.solver.state import InnerState, MarginalDrm, SolverError

logger = logging.getLogger(__name__)

MAX_LOG_DENOMINATOR = 700.0


def marginal_log_terms(
    alpha_bar: NDArray[np.float64],
    beta_bar: NDArray[np.float64],
    q: NDArray[np.float64],
    n_k: NDArray[np.float64],
) -> NDArray[np.float64]:
    """log(n_k) + alpha_bar_k + beta_bar_k^T q~_r for every atom r and level k, (n, K)."""
    return np.log(n_k)[None, :] + alpha_bar[None, :] + q @ beta_bar.T


def marginal_denominator(
    marginal: MarginalDrm, q: NDArray[np.float64], n_k: NDArray[np.float64]
) -> NDArray[np.float64]:
    """sum_k n_k exp{alpha_bar_k + beta_bar_k^T q~_r} for every atom r."""
    return np.exp(
        logsumexp(marginal_log_terms(marginal.alpha_bar, marginal.beta_bar, q, n_k), axis=1)
    )


def fit_marginal_drm(
    data: Dataset,
    spec: ModelSpec,
    cfg: SolverConfig,
    theta: ThetaParams | None = None,
) -> InnerState:
    """
    Fit the marginal DRM and derive baseline weights and normalizers.

    Args:
        data: observations in K groups
        spec: model spec; its basis centre fixes E_{G0}[q]
        cfg: tolerances for the multiplier and the dual ascent
        theta: tilt used for the returned normalizers (zeros when omitted)

    Returns:
        InnerState with p^mar, alpha^mar for theta and the marginal multiplier

    Raises:
        SolverError: when the marginal fit does not converge
    """
    design = TiltDesign.build(data, spec)
    theta = theta if theta is not None else ThetaParams.for_spec(spec)
    marginal, lam = _fit_dual(design, cfg)
    n_k = np.asarray(data.n_k, dtype=float)
    raw = 1.0 / (marginal_denominator(marginal, design.q, n_k) + design.q @ lam)
    p = raw / raw.sum()

    betas = design.betas(theta)
    alpha = alpha_for_weights(design, betas, p)
    residuals = constraint_residuals(design, betas, p, alpha)
    logger.debug(
        f"Marginal DRM fitted in {marginal.iterations} iterations, "
        f"|grad|={marginal.gradient_norm:.3e}, residuals {residuals}"
    )
    return InnerState(
        p=p,
        alpha=alpha,
        lam=lam,
        algorithm=Algorithm.MARGINAL_APPROX,
        residuals=residuals,
        iterations=marginal.iterations,
        marginal=marginal,
    )


def _fit_dual(
    design: TiltDesign, cfg: SolverConfig
) -> tuple[MarginalDrm, NDArray[np.float64]]:
    q = design.q
    n, d = q.shape
    n_k = np.array([idx.size for idx in design.groups], dtype=float)
    K = n_k.size

    if K == 1:
        lam, _ = newton_lambda(np.full(n, n_k[0]), q, cfg)
        return MarginalDrm(np.zeros(1), np.zeros((1, d)), 0, 0.0), lam

    own_q = np.stack([q[idx].sum(axis=0) for idx in design.groups[1:]])
    cache: dict[str, NDArray[np.float64]] = {"lam": np.zeros(d)}

    def unpack(psi: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        rest = psi.reshape(K - 1, 1 + d)
        alpha_bar = np.concatenate([[0.0], rest[:, 0]])
        beta_bar = np.vstack([np.zeros((1, d)), rest[:, 1:]])
        return alpha_bar, beta_bar

    def dual(psi: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        alpha_bar, beta_bar = unpack(psi)
        terms = marginal_log_terms(alpha_bar, beta_bar, q, n_k)
        log_base = logsumexp(terms, axis=1)
        if np.max(log_base) > MAX_LOG_DENOMINATOR:
            raise InfeasibleStateError("Marginal tilt overflows")
        base = np.exp(log_base)
        lam, _ = newton_lambda(base, q, cfg, start=cache["lam"])
        cache["lam"] = lam
        denom = base + q @ lam
        value = float(
            n_k[1:] @ alpha_bar[1:]
            + np.sum(own_q * beta_bar[1:])
            - np.sum(np.log(denom))
        )
        weights = np.exp(terms[:, 1:]) / denom[:, None]
        grad_alpha = n_k[1:] - weights.sum(axis=0)
        grad_beta = own_q - weights.T @ q
        return value, np.column_stack([grad_alpha, grad_beta]).reshape(-1)

    spread = np.std(q, axis=0)
    spread[spread == 0] = 1.0
    typical = np.tile(np.concatenate([[1.0], 1.0 / spread]), K - 1)

    result = maximize(
        dual,
        np.zeros((K - 1) * (1 + d)),
        gtol=cfg.outer_tol,
        max_iter=cfg.outer_max_iter,
        typical=typical,
        damping=cfg.damping,
    )
    if not result.converged and result.gradient_norm > np.sqrt(cfg.lambda_newton_tol) * n:
        raise SolverError(
            f"Marginal DRM fit did not converge ({result.status})",
            {"gradient_norm": result.gradient_norm, "iterations": result.iterations},
        )
    alpha_bar, beta_bar = unpack(result.x)
    # lambda at the returned point, not at the last trial
    base = np.exp(logsumexp(marginal_log_terms(alpha_bar, beta_bar, q, n_k), axis=1))
    lam, _ = newton_lambda(base, q, cfg, start=cache["lam"])
    marginal = MarginalDrm(alpha_bar, beta_bar, result.iterations, result.gradient_norm)
    return marginal, lam
