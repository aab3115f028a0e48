"""
Parameter containers: tilt coefficients and fitted models.
"""

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.model.basis import SpecError
from src.model.spec import ModelSpec


@dataclass(frozen=True, eq=False)
class ThetaParams:
    """One m x d coefficient matrix per treatment level, ordered 1..K."""

    theta: tuple[NDArray[np.float64], ...]

    def __post_init__(self) -> None:
        mats = tuple(np.array(t, dtype=float, ndmin=2) for t in self.theta)
        if not mats:
            raise SpecError("ThetaParams needs at least one level")
        shape = mats[0].shape
        if any(t.shape != shape for t in mats):
            raise SpecError("All theta matrices must share one shape")
        if not all(np.all(np.isfinite(t)) for t in mats):
            raise SpecError("theta entries must be finite")
        for t in mats:
            t.setflags(write=False)
        object.__setattr__(self, "theta", mats)

    @classmethod
    def zeros(cls, K: int, m: int, d: int) -> "ThetaParams":
        return cls(tuple(np.zeros((m, d)) for _ in range(K)))

    @classmethod
    def for_spec(cls, spec: ModelSpec) -> "ThetaParams":
        return cls.zeros(spec.K, spec.m, spec.d)

    @classmethod
    def from_array(cls, values: ArrayLike, K: int, m: int, d: int) -> "ThetaParams":
        stacked = np.asarray(values, dtype=float).reshape(K, m, d)
        return cls(tuple(stacked[k] for k in range(K)))

    @property
    def K(self) -> int:
        return len(self.theta)

    @property
    def shape(self) -> tuple[int, int]:
        m, d = self.theta[0].shape
        return int(m), int(d)

    def stacked(self) -> NDArray[np.float64]:
        """Return a (K, m, d) array."""
        return np.stack(self.theta)

    def flat(self) -> NDArray[np.float64]:
        return self.stacked().reshape(-1)

    def to_lists(self) -> list[list[list[float]]]:
        return [t.tolist() for t in self.theta]


@dataclass
class FitDiagnostics:
    """Solver bookkeeping attached to a fit."""

    algorithm: str
    converged: bool
    status: str
    iterations: int = 0
    inner_iterations: int = 0
    gradient_norm: float = float("nan")
    objective: float = float("nan")
    residuals: dict[str, float] = field(default_factory=dict)
    trajectory: list[dict[str, float]] = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "converged": self.converged,
            "status": self.status,
            "iterations": self.iterations,
            "inner_iterations": self.inner_iterations,
            "gradient_norm": self.gradient_norm,
            "objective": self.objective,
            "residuals": dict(self.residuals),
            "trajectory": list(self.trajectory),
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True, eq=False)
class DrmFit:
    """
    Fitted density ratio model.

    p_hat, alpha_hat and atoms are indexed by observation in dataset order;
    support gives the sorted view of the atoms. spec carries the resolved
    basis centre.
    """

    spec: ModelSpec
    theta_hat: ThetaParams
    p_hat: NDArray[np.float64]
    alpha_hat: NDArray[np.float64]
    lambda_hat: NDArray[np.float64]
    atoms: NDArray[np.float64]
    diagnostics: FitDiagnostics

    def __post_init__(self) -> None:
        if self.spec.basis_center is None:
            raise SpecError("A fitted model must carry a resolved basis centre")
        n = self.atoms.shape[0]
        if self.p_hat.shape != (n,) or self.alpha_hat.shape != (n,):
            raise SpecError("p_hat and alpha_hat must have one entry per atom")
        if self.lambda_hat.shape != (self.spec.d,):
            raise SpecError("lambda_hat must have length d")
        if np.any(self.p_hat <= 0):
            raise SpecError("p_hat entries must be strictly positive")

    @property
    def support(self) -> tuple[NDArray[np.float64], NDArray[np.int64]]:
        """Sorted atom values and the original observation index of each."""
        order = np.argsort(self.atoms, kind="stable")
        return self.atoms[order], order

    def q_tilde(self) -> NDArray[np.float64]:
        """Centred basis evaluated at every atom, (n, d)."""
        return self.spec.basis.evaluate(self.atoms) - self.spec.center_vector()

    def to_dict(self) -> dict[str, Any]:
        return {
            "model": self.spec.to_dict(),
            "theta": self.theta_hat.to_lists(),
            "lambda": self.lambda_hat.tolist(),
            "n_atoms": int(self.atoms.shape[0]),
            "diagnostics": self.diagnostics.to_dict(),
        }
