"""
Declarative model specification and its JSON form.
"""

import json
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.model.basis import BasisSpec, SpecError, parse_basis
from src.model.features import FeatureMap


@dataclass(frozen=True)
class ModelSpec:
    """
    Basis q(y), feature map phi(x) and treatment levels.

    basis_center is the fixed value of E_{G0}[q(Y)]; when None it is resolved
    at fit time from the reference group.
    """

    basis: BasisSpec
    features: FeatureMap
    treatment_levels: tuple[str, ...]
    basis_center: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        levels = tuple(str(level) for level in self.treatment_levels)
        if not levels:
            raise SpecError("At least one treatment level is required")
        if len(set(levels)) != len(levels):
            raise SpecError(f"Treatment levels must be distinct: {levels}")
        object.__setattr__(self, "treatment_levels", levels)
        if self.basis_center is not None:
            center = tuple(float(c) for c in self.basis_center)
            if len(center) != self.basis.d:
                raise SpecError(
                    f"basis_center has {len(center)} entries, basis has d={self.basis.d}"
                )
            if not all(np.isfinite(center)):
                raise SpecError("basis_center must be finite")
            object.__setattr__(self, "basis_center", center)

    @property
    def K(self) -> int:
        return len(self.treatment_levels)

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def m(self) -> int:
        return self.features.m

    def center_vector(self) -> NDArray[np.float64]:
        if self.basis_center is None:
            return np.zeros(self.basis.d)
        return np.asarray(self.basis_center, dtype=float)

    def with_center(self, center: NDArray[np.float64]) -> "ModelSpec":
        return replace(self, basis_center=tuple(float(c) for c in center))

    def level_index(self, level: str | int) -> int:
        """
        Resolve a level to its 1-based index.

        Integers are indices. Strings are labels first and indices second, so
        "1" names the level labelled "1" when one exists.
        """
        return resolve_level(self.treatment_levels, level)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "basis": self.basis.names,
            "features": self.features.to_descriptors(),
            "treatment_levels": list(self.treatment_levels),
        }
        if self.basis_center is not None:
            payload["basis_center"] = list(self.basis_center)
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ModelSpec":
        """
        Build a spec from its configuration document.

        treatment_levels may be a list of labels or an integer K, in which
        case the labels are "1".."K".
        """
        missing = [k for k in ("basis", "features", "treatment_levels") if k not in payload]
        if missing:
            raise SpecError(f"Model spec is missing keys: {missing}")
        levels = payload["treatment_levels"]
        if isinstance(levels, int):
            if levels < 1:
                raise SpecError("treatment_levels must be at least 1")
            levels = [str(k) for k in range(1, levels + 1)]
        center = payload.get("basis_center")
        return cls(
            basis=parse_basis(payload["basis"]),
            features=FeatureMap.from_descriptors(payload["features"]),
            treatment_levels=tuple(str(v) for v in levels),
            basis_center=tuple(center) if center is not None else None,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ModelSpec":
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"Model spec is not valid JSON: {e}") from e
        if not isinstance(payload, dict):
            raise SpecError("Model spec must be a JSON object")
        return cls.from_dict(payload)


def resolve_level(labels: tuple[str, ...], level: str | int) -> int:
    """Map a label or 1-based index onto a 1-based index into labels."""
    K = len(labels)
    if isinstance(level, bool):
        raise SpecError(f"Invalid treatment level {level!r}")
    if isinstance(level, int | np.integer):
        index = int(level)
    else:
        key = str(level)
        if key in labels:
            return labels.index(key) + 1
        try:
            index = int(key)
        except ValueError as e:
            raise SpecError(
                f"Unknown treatment level {level!r}; known: {list(labels)}"
            ) from e
    if not 1 <= index <= K:
        raise SpecError(f"Treatment level index {index} outside 1..{K}")
    return index
