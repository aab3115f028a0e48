"""
Inner solves for the baseline weights, normalizers and multiplier at fixed theta.

update_p, update_alpha and solve_lambda are the three steps of the iterative
algorithm; inner_solve_iterative cycles them to a fixed point.
"""

import logging

import numpy as np
from numpy.typing import NDArray

from src.model.dataset import Dataset
from src.model.params import ThetaParams
from src.model.spec import ModelSpec
from src.model.tilt import InfeasibleStateError
from src.solver.config import Algorithm, SolverConfig
from src.solver.design import TiltDesign
from src.solver.state import InnerState, SolverError

logger = logging.getLogger(__name__)


def newton_lambda(
    base: NDArray[np.float64],
    q: NDArray[np.float64],
    cfg: SolverConfig,
    start: NDArray[np.float64] | None = None,
) -> tuple[NDArray[np.float64], int]:
    """
    Solve sum_r q_r / (base_r + lambda^T q_r) = 0 for lambda.

    The root maximizes the concave G(lambda) = sum_r log(base_r + lambda^T q_r),
    so Newton steps are halved (factor cfg.damping) until every denominator
    stays positive and G does not drop.

    Returns:
        (lambda, newton iterations)

    Raises:
        SolverError: on divergence or a singular Jacobian
    """
    d = q.shape[1]
    lam = np.zeros(d) if start is None else np.array(start, dtype=float)
    if np.any(base + q @ lam <= 0):
        lam = np.zeros(d)
    if np.any(base <= 0):
        raise InfeasibleStateError("Exponent sums must be positive")

    residual = np.inf
    for it in range(cfg.lambda_max_iter + 1):
        denom = base + q @ lam
        ratio = q / denom[:, None]
        grad = ratio.sum(axis=0)
        residual = float(np.max(np.abs(grad)))
        if residual < cfg.lambda_newton_tol:
            return lam, it
        if it == cfg.lambda_max_iter:
            break
        jac = ratio.T @ ratio
        try:
            step = np.linalg.solve(jac, grad)
        except np.linalg.LinAlgError as e:
            raise SolverError(
                "Multiplier Jacobian is singular; the basis is degenerate on the atoms",
                {"residual": residual},
            ) from e

        current = float(np.sum(np.log(denom)))
        slack = 1e-12 * (1.0 + abs(current))
        t = 1.0
        while True:
            trial = lam + t * step
            trial_denom = base + q @ trial
            if np.all(trial_denom > 0) and np.sum(np.log(trial_denom)) >= current - slack:
                break
            t *= cfg.damping
            if t < 1e-16:
                raise SolverError(
                    "Multiplier line search exhausted",
                    {"residual": residual, "iterations": it},
                )
        lam = trial

    raise SolverError(
        f"Multiplier Newton did not converge in {cfg.lambda_max_iter} iterations",
        {"residual": residual},
    )


def _denominators(
    design: TiltDesign,
    betas: NDArray[np.float64],
    alpha: NDArray[np.float64],
    lam: NDArray[np.float64],
) -> NDArray[np.float64]:
    return np.exp(design.column_logsumexp(betas, alpha)) + design.q @ lam


def constraint_residuals(
    design: TiltDesign,
    betas: NDArray[np.float64],
    p: NDArray[np.float64],
    alpha: NDArray[np.float64],
) -> dict[str, float]:
    """Residuals of sum p = 1, sum p q~ = 0 and per-observation normalization."""
    mass, _ = design.tilted_moments(betas, alpha, np.log(p))
    return {
        "sum_p": float(abs(p.sum() - 1.0)),
        "moment": float(np.max(np.abs(p @ design.q))),
        "normalization": float(np.max(np.abs(mass - 1.0))),
    }


def update_p(
    theta: ThetaParams,
    alpha: NDArray[np.float64],
    lam: NDArray[np.float64],
    data: Dataset,
    spec: ModelSpec,
) -> NDArray[np.float64]:
    """
    Baseline weights p_r = 1 / (sum_kj exp{alpha_kj + beta_kj^T q~_r} + lambda^T q~_r).

    Raises:
        InfeasibleStateError: when some denominator is not positive
    """
    design = TiltDesign.build(data, spec)
    return _update_p(design, design.betas(theta), np.asarray(alpha, float), lam)


def _update_p(
    design: TiltDesign,
    betas: NDArray[np.float64],
    alpha: NDArray[np.float64],
    lam: NDArray[np.float64],
) -> NDArray[np.float64]:
    denom = _denominators(design, betas, alpha, np.asarray(lam, dtype=float))
    if not np.all(denom > 0):
        bad = int(np.flatnonzero(~(denom > 0))[0])
        raise InfeasibleStateError(
            f"Nonpositive weight denominator at atom {bad}",
            {"atom": bad, "denominator": float(denom[bad])},
        )
    return 1.0 / denom


def update_alpha(
    theta: ThetaParams,
    p: NDArray[np.float64],
    data: Dataset,
    spec: ModelSpec,
) -> NDArray[np.float64]:
    """alpha_kj = -log sum_r p_r exp{beta_kj^T q~_r} for every observation."""
    design = TiltDesign.build(data, spec)
    return alpha_for_weights(design, design.betas(theta), np.asarray(p, dtype=float))


def alpha_for_weights(
    design: TiltDesign, betas: NDArray[np.float64], p: NDArray[np.float64]
) -> NDArray[np.float64]:
    if np.any(p <= 0):
        raise InfeasibleStateError("Baseline weights must be strictly positive")
    return -design.row_logsumexp(betas, np.log(p))


def solve_lambda(
    theta: ThetaParams,
    alpha: NDArray[np.float64],
    data: Dataset,
    spec: ModelSpec,
    cfg: SolverConfig,
) -> NDArray[np.float64]:
    """Multiplier that makes the weights implied by (theta, alpha) satisfy sum p q~ = 0."""
    design = TiltDesign.build(data, spec)
    base = np.exp(design.column_logsumexp(design.betas(theta), np.asarray(alpha, float)))
    lam, _ = newton_lambda(base, design.q, cfg)
    return lam


def inner_solve_iterative(
    theta: ThetaParams,
    data: Dataset,
    spec: ModelSpec,
    cfg: SolverConfig,
    start: InnerState | None = None,
) -> InnerState:
    """
    Cycle update_p, update_alpha and solve_lambda until the largest change in
    (p, alpha, lambda) drops below cfg.inner_tol.

    Starts from p = 1/n, alpha = 0, lambda = 0 unless a warm start is given.
    The returned weights are the normalized update from the last (alpha, lambda)
    with alpha refreshed, so all three constraints hold to multiplier accuracy.

    Raises:
        SolverError: when the cycle does not settle within cfg.inner_max_iter
    """
    design = TiltDesign.build(data, spec)
    return iterate_inner(design, design.betas(theta), cfg, start)


def iterate_inner(
    design: TiltDesign,
    betas: NDArray[np.float64],
    cfg: SolverConfig,
    start: InnerState | None = None,
) -> InnerState:
    n = design.n
    if start is None:
        p = np.full(n, 1.0 / n)
        alpha = np.zeros(n)
        lam = np.zeros(design.q.shape[1])
    else:
        p, alpha, lam = start.p, start.alpha, start.lam

    change = np.inf
    for it in range(1, cfg.inner_max_iter + 1):
        base = np.exp(design.column_logsumexp(betas, alpha))
        shrink = 1.0
        while not np.all(base + design.q @ (shrink * lam) > 0):
            shrink *= cfg.damping
            if shrink < 1e-16:
                raise InfeasibleStateError("Could not damp lambda into the feasible region")
        raw = 1.0 / (base + design.q @ (shrink * lam))
        p_new = raw / raw.sum()
        alpha_new = alpha_for_weights(design, betas, p_new)
        base_new = np.exp(design.column_logsumexp(betas, alpha_new))
        lam_new, _ = newton_lambda(base_new, design.q, cfg, start=lam)

        change = max(
            float(np.max(np.abs(p_new - p))),
            float(np.max(np.abs(alpha_new - alpha))),
            float(np.max(np.abs(lam_new - lam))),
        )
        p, alpha, lam = p_new, alpha_new, lam_new
        if change < cfg.inner_tol:
            break
    else:
        raise SolverError(
            f"Iterative inner solve did not converge in {cfg.inner_max_iter} cycles",
            {"last_change": change},
        )

    raw = _update_p(design, betas, alpha, lam)
    p = raw / raw.sum()
    alpha = alpha_for_weights(design, betas, p)
    residuals = constraint_residuals(design, betas, p, alpha)
    logger.debug(f"Inner solve settled after {it} cycles, residuals {residuals}")
    return InnerState(
        p=p,
        alpha=alpha,
        lam=lam,
        algorithm=Algorithm.ITERATIVE,
        residuals=residuals,
        iterations=it,
    )
