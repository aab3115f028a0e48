"""
Outcome basis q(y) for the density ratio model.

The basis is a closed menu of transforms so that support checks are
decidable from the component list alone.
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.utils.errors import DrmError

logger = logging.getLogger(__name__)


class SpecError(DrmError):
    """Raised when a model specification is malformed."""

    code = "INVALID_SPEC"


class SupportDomainError(DrmError):
    """Raised when an outcome lies outside the basis support."""

    code = "SUPPORT_DOMAIN"


class BasisTerm(StrEnum):
    IDENTITY = "identity"
    SQUARE = "square"
    SQRT = "sqrt"
    LOG = "log"
    SQRT_ABS = "sqrt_abs"
    LOG_ABS = "log_abs"


_POSITIVE_ONLY = frozenset({BasisTerm.LOG})
_NONNEGATIVE_ONLY = frozenset({BasisTerm.SQRT})
_NONZERO_ONLY = frozenset({BasisTerm.LOG_ABS})


@dataclass(frozen=True)
class BasisSpec:
    """Ordered list of basis components q_1..q_d."""

    components: tuple[BasisTerm, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise SpecError("Basis must have at least one component")
        try:
            terms = tuple(BasisTerm(c) for c in self.components)
        except ValueError as e:
            raise SpecError(f"Unknown basis term: {e}") from e
        if len(set(terms)) != len(terms):
            raise SpecError(f"Basis components must be distinct: {list(terms)}")
        object.__setattr__(self, "components", terms)

    @classmethod
    def of(cls, *names: str) -> "BasisSpec":
        return cls(tuple(BasisTerm(n) for n in names))

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def positive_only(self) -> bool:
        """True when some component needs y > 0."""
        return any(c in _POSITIVE_ONLY for c in self.components)

    @property
    def nonnegative_only(self) -> bool:
        """True when some component needs y >= 0."""
        return any(c in _NONNEGATIVE_ONLY for c in self.components)

    @property
    def names(self) -> list[str]:
        return [str(c) for c in self.components]

    def check_support(self, y: ArrayLike) -> None:
        """
        Reject outcomes outside the basis support.

        Raises:
            SupportDomainError: naming the first offending value
        """
        values = np.atleast_1d(np.asarray(y, dtype=float))
        if self.positive_only:
            bad = np.flatnonzero(values <= 0)
            if bad.size:
                raise SupportDomainError(
                    f"Basis {self.names} requires y > 0, got y={values[bad[0]]!r}",
                    {"index": int(bad[0]), "value": float(values[bad[0]])},
                )
        if self.nonnegative_only:
            bad = np.flatnonzero(values < 0)
            if bad.size:
                raise SupportDomainError(
                    f"Basis {self.names} requires y >= 0, got y={values[bad[0]]!r}",
                    {"index": int(bad[0]), "value": float(values[bad[0]])},
                )
        if any(c in _NONZERO_ONLY for c in self.components):
            bad = np.flatnonzero(values == 0)
            if bad.size:
                raise SupportDomainError(
                    f"Basis {self.names} requires y != 0",
                    {"index": int(bad[0]), "value": 0.0},
                )

    def evaluate(self, y: ArrayLike) -> NDArray[np.float64]:
        """Evaluate q at every entry of y; returns an (n, d) matrix."""
        values = np.atleast_1d(np.asarray(y, dtype=float))
        self.check_support(values)
        columns = [_TRANSFORMS[c](values) for c in self.components]
        return np.column_stack(columns)


_TRANSFORMS = {
    BasisTerm.IDENTITY: lambda y: y,
    BasisTerm.SQUARE: lambda y: y * y,
    BasisTerm.SQRT: np.sqrt,
    BasisTerm.LOG: np.log,
    BasisTerm.SQRT_ABS: lambda y: np.sqrt(np.abs(y)),
    BasisTerm.LOG_ABS: lambda y: np.log(np.abs(y)),
}


def eval_basis(basis: BasisSpec, y: float) -> NDArray[np.float64]:
    """Return (q_1(y), ..., q_d(y)) for a single outcome."""
    return basis.evaluate([y])[0]


def parse_basis(names: Iterable[str]) -> BasisSpec:
    """Build a BasisSpec from configuration term names."""
    try:
        return BasisSpec(tuple(BasisTerm(str(n)) for n in names))
    except ValueError as e:
        raise SpecError(f"Invalid basis term in {list(names)}: {e}") from e
