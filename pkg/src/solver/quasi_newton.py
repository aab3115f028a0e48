"""
BFGS ascent with backtracking line search.

The objective may reject a trial point by raising a DrmError or producing a
floating-point fault; the line search treats such points like a failed
sufficient-increase test and halves the step.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from src.solver.state import SolverError
from src.utils.errors import DrmError

logger = logging.getLogger(__name__)

Objective = Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]]

ARMIJO = 1e-4
MAX_BACKTRACKS = 60
NOISE = 1e-11


@dataclass
class AscentResult:
    """Outcome of a quasi-Newton ascent."""

    x: NDArray[np.float64]
    value: float
    grad: NDArray[np.float64]
    iterations: int
    evaluations: int
    status: str
    trajectory: list[dict[str, float]] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def gradient_norm(self) -> float:
        return float(np.max(np.abs(self.grad))) if self.grad.size else 0.0


def _evaluate(
    fun: Objective, x: NDArray[np.float64]
) -> tuple[float, NDArray[np.float64]] | None:
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            value, grad = fun(x)
    except (DrmError, FloatingPointError) as e:
        logger.debug(f"Trial point rejected: {e}")
        return None
    grad = np.asarray(grad, dtype=float)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        return None
    return float(value), grad


def maximize(
    fun: Objective,
    x0: NDArray[np.float64],
    *,
    gtol: float,
    max_iter: int,
    typical: NDArray[np.float64] | None = None,
    damping: float = 0.5,
    callback: Callable[[NDArray[np.float64], float, NDArray[np.float64]], None]
    | None = None,
) -> AscentResult:
    """
    Maximize fun by BFGS with an inverse-Hessian estimate.

    Args:
        fun: returns (value, gradient) at x
        x0: feasible starting point
        gtol: stop once max |gradient| < gtol
        max_iter: cap on accepted steps
        typical: typical parameter magnitudes; the search runs in x / typical
        damping: backtracking factor
        callback: called with (x, value, gradient) after each accepted step

    Returns:
        AscentResult with status "converged", "stalled" or "max_iter"
    """
    scale = np.ones_like(x0, dtype=float) if typical is None else np.asarray(typical, float)
    x = np.array(x0, dtype=float)
    first = _evaluate(fun, x)
    if first is None:
        raise SolverError("Objective is not finite at the starting point")
    value, grad = first
    evaluations = 1
    dim = x.size
    inv_hess = np.eye(dim)
    scaled_once = False
    trajectory = [{"iteration": 0, "objective": value, "gradient_norm": _norm(grad)}]

    it = 0
    status = "max_iter"
    while True:
        if _norm(grad) < gtol:
            status = "converged"
            break
        if it >= max_iter:
            break

        g_u = grad * scale
        direction = inv_hess @ g_u
        slope = float(g_u @ direction)
        if slope <= 0:
            inv_hess = np.eye(dim)
            scaled_once = False
            direction = g_u
            slope = float(g_u @ g_u)
        t = 1.0 if scaled_once else min(1.0, 1.0 / max(float(np.max(np.abs(g_u))), 1e-300))

        accepted = None
        for _ in range(MAX_BACKTRACKS):
            trial_x = x + t * direction * scale
            trial = _evaluate(fun, trial_x)
            evaluations += 1
            if trial is not None:
                trial_value, trial_grad = trial
                if trial_value >= value + ARMIJO * t * slope:
                    accepted = (trial_x, trial_value, trial_grad)
                    break
                flat = abs(trial_value - value) <= NOISE * (1.0 + abs(value))
                if flat and _norm(trial_grad) < _norm(grad):
                    accepted = (trial_x, trial_value, trial_grad)
                    break
            t *= damping

        if accepted is None:
            if scaled_once or not np.allclose(inv_hess, np.eye(dim)):
                logger.debug(f"Line search failed at iteration {it}; resetting curvature")
                inv_hess = np.eye(dim)
                scaled_once = False
                continue
            status = "stalled"
            break

        new_x, new_value, new_grad = accepted
        s = (new_x - x) / scale
        y = (grad - new_grad) * scale
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if not scaled_once:
                inv_hess = np.eye(dim) * (sy / float(y @ y))
                scaled_once = True
            rho = 1.0 / sy
            left = np.eye(dim) - rho * np.outer(s, y)
            inv_hess = left @ inv_hess @ left.T + rho * np.outer(s, s)

        x, value, grad = new_x, new_value, new_grad
        it += 1
        trajectory.append(
            {"iteration": it, "objective": value, "gradient_norm": _norm(grad)}
        )
        logger.debug(
            f"Ascent iteration {it}: objective={value:.10g}, "
            f"|grad|={_norm(grad):.3e}, step={t:.3g}"
        )
        if callback is not None:
            callback(x, value, grad)

    return AscentResult(
        x=x,
        value=value,
        grad=grad,
        iterations=it,
        evaluations=evaluations,
        status=status,
        trajectory=trajectory,
    )


def _norm(grad: NDArray[np.float64]) -> float:
    return float(np.max(np.abs(grad))) if grad.size else 0.0
