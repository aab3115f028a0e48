"""
The four synthetic data-generating processes.

Every sampler returns both potential outcomes and their conditional means
for each unit; the observed outcome picks the one matching the drawn
treatment. Treatment a=0 is level 1 (label "0") and a=1 is level 2.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from joblib import Parallel, delayed
from numpy.typing import NDArray
from scipy.special import expit

from src.datagen.rng import (
    BLOCK_UNITS,
    GENERATION_STREAM,
    block_generator,
    block_layout,
    check_seed,
)
from src.model.dataset import Dataset
from src.model.spec import SpecError
from src.utils.errors import DrmError

logger = logging.getLogger(__name__)

LABELS = ("0", "1")


class UnsupportedFamilyError(DrmError):
    """Raised for an unknown family or one without a requested closed form."""

    code = "UNSUPPORTED_FAMILY"


class Family(StrEnum):
    GAUSSIAN = "gaussian"
    GAMMA = "gamma"
    POISSON = "poisson"
    EXPONENTIAL = "exponential"


def parse_family(name: str | Family) -> Family:
    try:
        return Family(str(name).lower())
    except ValueError as e:
        known = [f.value for f in Family]
        raise UnsupportedFamilyError(
            f"Unknown family {name!r}; known: {known}", {"family": str(name)}
        ) from e


@dataclass(frozen=True)
class DgpSpec:
    """A family, a sample size and a 64-bit seed."""

    family: Family
    n: int
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", parse_family(self.family))
        if self.n < 2:
            raise SpecError(f"Sample size must be at least 2, got {self.n}")
        object.__setattr__(self, "seed", check_seed(self.seed))


@dataclass(frozen=True, eq=False)
class UnitDraws:
    """Treatment, covariates (x1, x2), potential outcomes and their means."""

    a: NDArray[np.int64]
    x: NDArray[np.float64]
    y0: NDArray[np.float64]
    y1: NDArray[np.float64]
    m0: NDArray[np.float64]
    m1: NDArray[np.float64]

    @property
    def y(self) -> NDArray[np.float64]:
        return np.where(self.a == 1, self.y1, self.y0)

    @classmethod
    def concat(cls, parts: list["UnitDraws"]) -> "UnitDraws":
        return cls(
            a=np.concatenate([p.a for p in parts]),
            x=np.concatenate([p.x for p in parts]),
            y0=np.concatenate([p.y0 for p in parts]),
            y1=np.concatenate([p.y1 for p in parts]),
            m0=np.concatenate([p.m0 for p in parts]),
            m1=np.concatenate([p.m1 for p in parts]),
        )


def _gaussian(gen: np.random.Generator, size: int) -> UnitDraws:
    a = gen.binomial(1, 0.5, size)
    x1 = gen.normal(1.0, 1.0, size)
    x2 = gen.normal(2.0 * a * x1, 1.0)
    eps = gen.standard_normal(size)
    m0 = 1.0 + x1
    m1 = 2.0 + 3.0 * x1 - 0.5 * x1**2 + x2
    return UnitDraws(a, np.column_stack([x1, x2]), m0 + eps, m1 + eps, m0, m1)


def _gamma(gen: np.random.Generator, size: int) -> UnitDraws:
    # numpy's gamma takes (shape, scale)
    a = gen.binomial(1, 0.5, size)
    x1 = gen.gamma(1.0, 0.5, size)
    x2 = gen.gamma((a + 1) * (x1 + 1.0), 1.0)
    mu0 = gen.gamma(x1 + 1.0, 1.0)
    mu1 = gen.gamma(2.0 * (x1 + 1.0), 1.0)
    y0 = 0.5 * mu0 + 0.5 * x2
    y1 = mu1 + x2
    m0 = 0.5 * (x1 + 1.0) + 0.5 * x2
    m1 = 2.0 * (x1 + 1.0) + x2
    return UnitDraws(a, np.column_stack([x1, x2]), y0, y1, m0, m1)


def _poisson_mean(x1: NDArray[np.float64], x2: NDArray[np.float64], a: int) -> NDArray[np.float64]:
    return np.exp(5.0 - 0.1 * (a + 1) * x1 - a * x1**2 - 0.1 * (a + 1) * x2)


def _poisson(gen: np.random.Generator, size: int) -> UnitDraws:
    x1 = gen.uniform(-1.0, 1.0, size)
    x2 = gen.standard_normal(size)
    pi = expit(0.5 - 0.5 * x1 - 2.0 * x1**2 - 0.5 * x2)
    a = (gen.random(size) < pi).astype(np.int64)
    m0 = _poisson_mean(x1, x2, 0)
    m1 = _poisson_mean(x1, x2, 1)
    y0 = gen.poisson(m0).astype(float)
    y1 = gen.poisson(m1).astype(float)
    return UnitDraws(a, np.column_stack([x1, x2]), y0, y1, m0, m1)


def _exponential_rate(x1: NDArray[np.float64], x2: NDArray[np.float64], a: int) -> NDArray[np.float64]:
    return 0.1 * (1.0 + a * (x1 + 1.0) + 0.5 * (a + 1) * x2 + (x1 + 1.0) * x2)


def _exponential(gen: np.random.Generator, size: int) -> UnitDraws:
    x1 = gen.uniform(-1.0, 1.0, size)
    x2 = gen.exponential(1.0, size)
    pi = expit(1.0 - x1 + 0.5 * x2 - x1 * x2)
    a = (gen.random(size) < pi).astype(np.int64)
    m0 = 1.0 / _exponential_rate(x1, x2, 0)
    m1 = 1.0 / _exponential_rate(x1, x2, 1)
    y0 = gen.exponential(m0)
    y1 = gen.exponential(m1)
    return UnitDraws(a, np.column_stack([x1, x2]), y0, y1, m0, m1)


SAMPLERS: dict[Family, Callable[[np.random.Generator, int], UnitDraws]] = {
    Family.GAUSSIAN: _gaussian,
    Family.GAMMA: _gamma,
    Family.POISSON: _poisson,
    Family.EXPONENTIAL: _exponential,
}


def draw_block(
    family: Family, seed: int, block: int, size: int, stream: int = GENERATION_STREAM
) -> UnitDraws:
    return SAMPLERS[family](block_generator(seed, block, stream), size)


def draw_units(
    family: Family | str,
    n: int,
    seed: int,
    *,
    stream: int = GENERATION_STREAM,
    units_per_block: int = BLOCK_UNITS,
    workers: int = 1,
) -> UnitDraws:
    """Draw n units block by block; the result does not depend on workers."""
    fam = parse_family(family)
    layout = list(block_layout(n, units_per_block))
    if workers > 1 and len(layout) > 1:
        parts = Parallel(n_jobs=workers)(
            delayed(draw_block)(fam, seed, block, size, stream) for block, size in layout
        )
    else:
        parts = [draw_block(fam, seed, block, size, stream) for block, size in layout]
    return UnitDraws.concat(list(parts))


def generate(dgp: DgpSpec, workers: int = 1) -> Dataset:
    """Observed data (y, a, x1, x2) for one seeded draw of a family."""
    units = draw_units(dgp.family, dgp.n, dgp.seed, workers=workers)
    logger.debug(
        f"Generated {dgp.family} data: n={dgp.n}, seed={dgp.seed}, "
        f"treated={int(units.a.sum())}"
    )
    return Dataset.from_arrays(units.y, units.a + 1, units.x, labels=LABELS)
