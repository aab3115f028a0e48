"""
Maximum empirical likelihood estimation of the tilt parameters.
"""

import logging
import time
from dataclasses import replace
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.model.dataset import Dataset
from src.model.params import DrmFit, FitDiagnostics, ThetaParams
from src.model.spec import ModelSpec
from src.solver.config import SolverConfig
from src.solver.design import TiltDesign
from src.solver.inner import alpha_for_weights, constraint_residuals, iterate_inner
from src.solver.marginal import fit_marginal_drm
from src.solver.objective import logel_value, score_blocks
from src.solver.quasi_newton import AscentResult, maximize
from src.solver.state import InnerState, SolverError

logger = logging.getLogger(__name__)


def reference_center(data: Dataset, spec: ModelSpec) -> NDArray[np.float64]:
    """Sample mean of q over the reference group (level 1)."""
    return np.asarray(spec.basis.evaluate(data.y[data.group(1)]).mean(axis=0))


def resolve_spec(data: Dataset, spec: ModelSpec) -> ModelSpec:
    """Return spec with its basis centre fixed, defaulting to the reference mean."""
    if spec.basis_center is not None:
        return spec
    return spec.with_center(reference_center(data, spec))


def _typical_scale(design: TiltDesign, K: int) -> NDArray[np.float64]:
    def spread(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
        s = np.std(matrix, axis=0)
        s[s < 1e-12] = 1.0
        return s

    per_level = 1.0 / np.outer(spread(design.phi), spread(design.q))
    return np.tile(per_level.reshape(-1), K)


def fit_mele(
    data: Dataset,
    spec: ModelSpec,
    cfg: SolverConfig | None = None,
    *,
    freeze_theta: bool = False,
) -> DrmFit:
    """
    Maximize the profile log-EL over theta by BFGS, starting from theta = 0.

    Under the iterative algorithm the inner state is re-solved at every trial
    theta, warm-started from the last accepted state. Under marginal-approx,
    p and lambda come once from the marginal DRM and only alpha is refreshed.

    Args:
        data: observations in K groups
        spec: model spec; an unset basis centre defaults to the level-1 mean of q
        cfg: solver settings
        freeze_theta: hold theta at zero and only solve for the baseline

    Returns:
        DrmFit whose spec carries the resolved basis centre

    Raises:
        SolverError: on outer non-convergence, with the trajectory attached
    """
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    spec = resolve_spec(data, spec)
    design = TiltDesign.build(data, spec)
    K, m, d = spec.K, spec.m, spec.d
    logger.info(
        f"Fitting DRM: n={data.n}, K={K}, m={m}, d={d}, algorithm={cfg.algorithm}"
    )

    baseline: InnerState | None = None
    if not cfg.is_iterative:
        baseline = fit_marginal_drm(data, spec, cfg)

    tracker: dict[str, Any] = {"state": None, "trial": None, "inner": 0}

    def state_at(betas: NDArray[np.float64]) -> InnerState:
        if baseline is None:
            state = iterate_inner(design, betas, cfg, start=tracker["state"])
            tracker["inner"] += state.iterations
            return state
        return replace(baseline, alpha=alpha_for_weights(design, betas, baseline.p))

    def objective(flat: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        betas = design.betas(ThetaParams.from_array(flat, K, m, d))
        state = state_at(betas)
        tracker["trial"] = state
        if tracker["state"] is None:
            tracker["state"] = state
        value = logel_value(design, betas, state, refresh_alpha=False)
        return value, score_blocks(design, betas, state.p).reshape(-1)

    def accept(x: NDArray[np.float64], value: float, grad: NDArray[np.float64]) -> None:
        tracker["state"] = tracker["trial"]

    x0 = np.zeros(K * m * d)
    if freeze_theta:
        value, grad = objective(x0)
        result = AscentResult(
            x=x0, value=value, grad=grad, iterations=0, evaluations=1, status="frozen"
        )
    else:
        result = maximize(
            objective,
            x0,
            gtol=cfg.outer_tol,
            max_iter=cfg.outer_max_iter,
            typical=_typical_scale(design, K),
            damping=cfg.damping,
            callback=accept,
        )

    status = result.status
    converged = result.converged or status == "frozen"
    if (
        not converged
        and cfg.is_iterative
        and status == "stalled"
        and result.gradient_norm / data.n < np.sqrt(cfg.inner_tol)
    ):
        status = "stalled_at_inner_accuracy"
        converged = True
    if not converged:
        raise SolverError(
            f"Outer ascent did not converge ({status}) after {result.iterations} "
            f"iterations; |score|={result.gradient_norm:.3e}",
            {
                "status": status,
                "iterations": result.iterations,
                "gradient_norm": result.gradient_norm,
                "trajectory": result.trajectory[-10:],
            },
        )

    theta_hat = ThetaParams.from_array(result.x, K, m, d)
    betas = design.betas(theta_hat)
    state: InnerState = tracker["state"]
    if baseline is not None:
        state = replace(baseline, alpha=alpha_for_weights(design, betas, baseline.p))
    residuals = constraint_residuals(design, betas, state.p, state.alpha)

    diagnostics = FitDiagnostics(
        algorithm=str(cfg.algorithm),
        converged=True,
        status=status,
        iterations=result.iterations,
        inner_iterations=int(tracker["inner"]) if baseline is None else state.iterations,
        gradient_norm=result.gradient_norm,
        objective=result.value,
        residuals=residuals,
        trajectory=result.trajectory,
        wall_time=time.perf_counter() - started,
    )
    logger.info(
        f"DRM fit {status} in {result.iterations} iterations "
        f"({diagnostics.wall_time:.2f}s), |score|={result.gradient_norm:.2e}"
    )
    return DrmFit(
        spec=spec,
        theta_hat=theta_hat,
        p_hat=state.p,
        alpha_hat=state.alpha,
        lambda_hat=state.lam,
        atoms=np.array(data.y),
        diagnostics=diagnostics,
    )
