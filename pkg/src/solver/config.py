"""
Solver configuration.
"""

from dataclasses import asdict, dataclass, fields
from enum import StrEnum
from typing import Any

from src.model.basis import SpecError


class Algorithm(StrEnum):
    ITERATIVE = "iterative"
    MARGINAL_APPROX = "marginal-approx"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps for the inner and outer solvers."""

    algorithm: Algorithm = Algorithm.MARGINAL_APPROX
    inner_tol: float = 1e-8
    inner_max_iter: int = 5000
    outer_tol: float = 1e-6
    outer_max_iter: int = 500
    lambda_newton_tol: float = 1e-10
    lambda_max_iter: int = 100
    damping: float = 0.5

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        except ValueError as e:
            raise SpecError(
                f"Unknown algorithm {self.algorithm!r}; "
                f"expected one of {[a.value for a in Algorithm]}"
            ) from e
        for name in ("inner_tol", "outer_tol", "lambda_newton_tol"):
            if not getattr(self, name) > 0:
                raise SpecError(f"{name} must be positive")
        for name in ("inner_max_iter", "outer_max_iter", "lambda_max_iter"):
            if getattr(self, name) < 1:
                raise SpecError(f"{name} must be at least 1")
        if not 0 < self.damping < 1:
            raise SpecError("damping must lie in (0, 1)")

    @property
    def is_iterative(self) -> bool:
        return self.algorithm is Algorithm.ITERATIVE

    def to_dict(self) -> dict[str, Any]:
        payload = asdict(self)
        payload["algorithm"] = self.algorithm.value
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(payload) - known)
        if unknown:
            raise SpecError(f"Unknown solver settings: {unknown}")
        return cls(**payload)
