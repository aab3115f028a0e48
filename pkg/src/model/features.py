"""
Covariate feature map phi(x) used by beta(x; theta_k) = theta_k^T phi(x).
"""

from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.model.basis import SpecError


class FeatureKind(StrEnum):
    INTERCEPT = "intercept"
    RAW = "raw"
    SQUARED = "squared"
    INTERACTION = "interaction"


@dataclass(frozen=True)
class FeatureTerm:
    """One covariate feature; interaction indices are stored sorted."""

    kind: FeatureKind
    indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        kind = FeatureKind(self.kind)
        indices = tuple(int(i) for i in self.indices)
        expected = {
            FeatureKind.INTERCEPT: 0,
            FeatureKind.RAW: 1,
            FeatureKind.SQUARED: 1,
            FeatureKind.INTERACTION: 2,
        }[kind]
        if len(indices) != expected:
            raise SpecError(f"Feature {kind} takes {expected} indices, got {indices}")
        if any(i < 0 for i in indices):
            raise SpecError(f"Covariate indices must be nonnegative: {indices}")
        if kind is FeatureKind.INTERACTION:
            if indices[0] == indices[1]:
                raise SpecError("Use a squared term instead of a self-interaction")
            indices = tuple(sorted(indices))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def intercept(cls) -> "FeatureTerm":
        return cls(FeatureKind.INTERCEPT)

    @classmethod
    def raw(cls, i: int) -> "FeatureTerm":
        return cls(FeatureKind.RAW, (i,))

    @classmethod
    def squared(cls, i: int) -> "FeatureTerm":
        return cls(FeatureKind.SQUARED, (i,))

    @classmethod
    def interaction(cls, i: int, j: int) -> "FeatureTerm":
        return cls(FeatureKind.INTERACTION, (i, j))

    @property
    def label(self) -> str:
        if self.kind is FeatureKind.INTERCEPT:
            return "1"
        if self.kind is FeatureKind.RAW:
            return f"x{self.indices[0] + 1}"
        if self.kind is FeatureKind.SQUARED:
            return f"x{self.indices[0] + 1}^2"
        return f"x{self.indices[0] + 1}*x{self.indices[1] + 1}"

    def to_descriptor(self) -> str | dict[str, Any]:
        if self.kind is FeatureKind.INTERCEPT:
            return "intercept"
        if self.kind is FeatureKind.INTERACTION:
            return {"interaction": list(self.indices)}
        return {str(self.kind): self.indices[0]}

    @classmethod
    def from_descriptor(cls, descriptor: Any) -> "FeatureTerm":
        """
        Parse a configuration descriptor.

        Accepted forms: "intercept", {"raw": i}, {"squared": i},
        {"interaction": [i, j]}.
        """
        if descriptor == "intercept":
            return cls.intercept()
        if not isinstance(descriptor, dict) or len(descriptor) != 1:
            raise SpecError(f"Invalid feature descriptor: {descriptor!r}")
        ((key, value),) = descriptor.items()
        try:
            kind = FeatureKind(key)
        except ValueError as e:
            raise SpecError(f"Unknown feature kind: {key!r}") from e
        if kind is FeatureKind.INTERACTION:
            if not isinstance(value, list | tuple) or len(value) != 2:
                raise SpecError(f"Interaction needs two indices: {value!r}")
            return cls(kind, (int(value[0]), int(value[1])))
        if kind is FeatureKind.INTERCEPT:
            return cls.intercept()
        return cls(kind, (int(value),))

    def evaluate(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.kind is FeatureKind.INTERCEPT:
            return np.ones(x.shape[0])
        if self.kind is FeatureKind.RAW:
            return x[:, self.indices[0]]
        if self.kind is FeatureKind.SQUARED:
            col = x[:, self.indices[0]]
            return col * col
        return x[:, self.indices[0]] * x[:, self.indices[1]]


@dataclass(frozen=True)
class FeatureMap:
    """Ordered feature terms; phi(x) has one entry per term."""

    terms: tuple[FeatureTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise SpecError("Feature map must have at least one term")
        if len(set(terms)) != len(terms):
            raise SpecError("Feature terms must be distinct")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms: FeatureTerm) -> "FeatureMap":
        return cls(tuple(terms))

    @classmethod
    def from_descriptors(cls, descriptors: Iterable[Any]) -> "FeatureMap":
        return cls(tuple(FeatureTerm.from_descriptor(d) for d in descriptors))

    def to_descriptors(self) -> list[str | dict[str, Any]]:
        return [t.to_descriptor() for t in self.terms]

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def labels(self) -> list[str]:
        return [t.label for t in self.terms]

    @property
    def max_index(self) -> int:
        """Largest covariate index referenced, or -1 for intercept-only maps."""
        return max((max(t.indices) for t in self.terms if t.indices), default=-1)

    @property
    def has_intercept(self) -> bool:
        return any(t.kind is FeatureKind.INTERCEPT for t in self.terms)

    def without_intercept(self) -> "FeatureMap | None":
        """Drop the intercept term; None when nothing else remains."""
        rest = tuple(t for t in self.terms if t.kind is not FeatureKind.INTERCEPT)
        return FeatureMap(rest) if rest else None

    def validate_for(self, p: int) -> None:
        if self.max_index >= p:
            raise SpecError(
                f"Feature map references covariate index {self.max_index} "
                f"but the data has p={p} covariates"
            )

    def design(self, x: ArrayLike) -> NDArray[np.float64]:
        """Evaluate phi at every row of x; returns an (n, m) matrix."""
        matrix = np.atleast_2d(np.asarray(x, dtype=float))
        self.validate_for(matrix.shape[1])
        return np.column_stack([t.evaluate(matrix) for t in self.terms])


def eval_beta(
    features: FeatureMap, theta_k: ArrayLike, x: ArrayLike
) -> NDArray[np.float64]:
    """Return beta(x; theta_k) = phi(x)^T theta_k as a length-d vector."""
    phi = features.design(np.asarray(x, dtype=float).reshape(1, -1))[0]
    theta = np.atleast_2d(np.asarray(theta_k, dtype=float))
    if theta.shape[0] != features.m:
        raise SpecError(
            f"theta_k has {theta.shape[0]} rows, feature map has m={features.m}"
        )
    return np.asarray(phi @ theta, dtype=float)
