"""
Estimator catalogue for studies and one-off effect runs.

A tag names a method and, for the synthetic families, a covariate variant:
"DRM(full)", "AIPW(mis1)", "IPW-HT(mis)". A bare method tag ("DRM",
"G-formula") uses the model spec of the run configuration instead of a
family preset.
"""

import logging
import re
from dataclasses import dataclass
from enum import StrEnum

from src.datagen.families import Family, parse_family
from src.effects.drm import drm_ate, drm_qtet
from src.effects.models import Estimand
from src.effects.propensity import fit_propensity
from src.effects.regression import gformula_ate
from src.effects.weighting import aipw_ate, ipw_ate, ipw_qtet
from src.model.basis import BasisSpec
from src.model.dataset import Dataset
from src.model.features import FeatureMap, FeatureTerm
from src.model.spec import ModelSpec
from src.solver.config import SolverConfig
from src.solver.mele import fit_mele
from src.utils.config import ConfigurationError

logger = logging.getLogger(__name__)

_TAG = re.compile(r"^\s*(?P<method>[A-Za-z-]+)\s*(?:\(\s*(?P<variant>\w+)\s*\))?\s*$")


class Method(StrEnum):
    DRM = "DRM"
    GFORMULA = "G-formula"
    IPW = "IPW"
    IPW_HT = "IPW-HT"
    AIPW = "AIPW"


# estimands each method reports
METHOD_ESTIMANDS: dict[Method, tuple[Estimand, ...]] = {
    Method.DRM: (Estimand.ATE, Estimand.QTET),
    Method.GFORMULA: (Estimand.ATE,),
    Method.IPW: (Estimand.ATE, Estimand.QTET),
    Method.IPW_HT: (Estimand.ATE,),
    Method.AIPW: (Estimand.ATE,),
}

_ONE = FeatureTerm.intercept()
_X1 = FeatureTerm.raw(0)
_X2 = FeatureTerm.raw(1)
_X1SQ = FeatureTerm.squared(0)
_X1X2 = FeatureTerm.interaction(0, 1)


@dataclass(frozen=True)
class Variant:
    """Basis and feature map of one DRM variant."""

    basis: BasisSpec
    features: FeatureMap


DRM_PRESETS: dict[Family, dict[str, Variant]] = {
    Family.GAUSSIAN: {
        "full": Variant(BasisSpec.of("identity", "square"), FeatureMap.of(_ONE, _X1, _X1SQ, _X2)),
        "mis1": Variant(BasisSpec.of("identity", "square"), FeatureMap.of(_ONE, _X1, _X2)),
        "mis2": Variant(BasisSpec.of("identity", "square"), FeatureMap.of(_ONE, _X1)),
    },
    Family.GAMMA: {
        "full": Variant(BasisSpec.of("identity", "log"), FeatureMap.of(_ONE, _X1, _X2)),
        "mis1": Variant(BasisSpec.of("identity", "square"), FeatureMap.of(_ONE, _X1, _X2)),
        "mis2": Variant(BasisSpec.of("identity", "log"), FeatureMap.of(_ONE, _X1)),
    },
    Family.POISSON: {
        "full": Variant(BasisSpec.of("sqrt", "identity"), FeatureMap.of(_ONE, _X1, _X1SQ, _X2)),
        "mis": Variant(BasisSpec.of("sqrt", "identity"), FeatureMap.of(_ONE, _X2)),
    },
    Family.EXPONENTIAL: {
        "full": Variant(BasisSpec.of("sqrt"), FeatureMap.of(_ONE, _X1, _X2, _X1X2)),
        "mis": Variant(BasisSpec.of("sqrt"), FeatureMap.of(_ONE, _X1, _X2)),
    },
}

COMPARATOR_PRESETS: dict[Family, dict[str, FeatureMap]] = {
    Family.GAUSSIAN: {
        "full": FeatureMap.of(_X1, _X1SQ, _X2),
        "mis1": FeatureMap.of(_X1, _X2),
        "mis2": FeatureMap.of(_X1),
    },
    Family.GAMMA: {
        "full": FeatureMap.of(_X1, _X2),
        "mis": FeatureMap.of(_X1),
    },
    Family.POISSON: {
        "full": FeatureMap.of(_X1, _X1SQ, _X2),
        "mis": FeatureMap.of(_X2),
    },
    Family.EXPONENTIAL: {
        "full": FeatureMap.of(_X1, _X2, _X1X2),
        "mis": FeatureMap.of(_X1, _X2),
    },
}


@dataclass(frozen=True)
class EstimatorTag:
    method: Method
    variant: str | None = None

    @property
    def name(self) -> str:
        return f"{self.method}({self.variant})" if self.variant else str(self.method)

    @property
    def estimands(self) -> tuple[Estimand, ...]:
        return METHOD_ESTIMANDS[self.method]

    def __str__(self) -> str:
        return self.name


def parse_tag(tag: str) -> EstimatorTag:
    """
    Parse "METHOD" or "METHOD(variant)".

    Raises:
        ConfigurationError: on unknown methods or malformed tags
    """
    match = _TAG.match(tag)
    if match is None:
        raise ConfigurationError(f"Malformed estimator tag {tag!r}")
    name = match.group("method")
    by_name = {m.value.lower(): m for m in Method}
    method = by_name.get(name.lower())
    if method is None:
        raise ConfigurationError(
            f"Unknown estimator {name!r}; known: {[m.value for m in Method]}"
        )
    return EstimatorTag(method, match.group("variant"))


def check_tag_for_family(tag: EstimatorTag, family: Family | str) -> None:
    """Raise when a tag's variant has no preset for the family."""
    fam = parse_family(family)
    presets = DRM_PRESETS[fam] if tag.method is Method.DRM else COMPARATOR_PRESETS[fam]
    if tag.variant is None:
        raise ConfigurationError(
            f"Estimator {tag.name} needs a variant for the {fam} family; "
            f"known: {sorted(presets)}"
        )
    if tag.variant not in presets:
        raise ConfigurationError(
            f"No {tag.method} variant {tag.variant!r} for the {fam} family; "
            f"known: {sorted(presets)}"
        )


def preset_model(family: Family | str, variant: str) -> ModelSpec:
    """DRM spec of a family variant; levels are the generated labels."""
    fam = parse_family(family)
    check_tag_for_family(EstimatorTag(Method.DRM, variant), fam)
    chosen = DRM_PRESETS[fam][variant]
    return ModelSpec(chosen.basis, chosen.features, ("0", "1"))


@dataclass(frozen=True)
class Estimate:
    """One number produced by one estimator."""

    estimator: str
    estimand: Estimand
    level: float | None
    value: float


@dataclass(frozen=True)
class EstimationContext:
    """Everything an estimator needs besides the data."""

    treated: str
    control: str
    probs: tuple[float, ...]
    solver: SolverConfig
    family: Family | None = None
    model: ModelSpec | None = None

    def drm_spec(self, tag: EstimatorTag) -> ModelSpec:
        if tag.variant is not None and self.family is not None:
            return preset_model(self.family, tag.variant)
        if self.model is None:
            raise ConfigurationError(f"Estimator {tag.name} needs a model spec")
        return self.model

    def comparator_features(self, tag: EstimatorTag) -> FeatureMap:
        if tag.variant is not None and self.family is not None:
            check_tag_for_family(tag, self.family)
            return COMPARATOR_PRESETS[self.family][tag.variant]
        if self.model is None:
            raise ConfigurationError(f"Estimator {tag.name} needs a model spec")
        return self.model.features


def run_estimator(tag: EstimatorTag, data: Dataset, ctx: EstimationContext) -> list[Estimate]:
    """Run one estimator on one dataset; errors propagate to the caller."""
    name = tag.name
    t, c = ctx.treated, ctx.control
    if tag.method is Method.DRM:
        fit = fit_mele(data, ctx.drm_spec(tag), ctx.solver)
        out = [Estimate(name, Estimand.ATE, None, drm_ate(fit, data, t, c))]
        report = drm_qtet(fit, data, t, c, ctx.probs)
        out.extend(
            Estimate(name, Estimand.QTET, p, v)
            for p, v in zip(report.probs, report.values, strict=True)
        )
        return out

    features = ctx.comparator_features(tag)
    if tag.method is Method.GFORMULA:
        return [Estimate(name, Estimand.ATE, None, gformula_ate(data, features, t, c))]

    prop = fit_propensity(data, features, t, c)
    if tag.method is Method.AIPW:
        return [Estimate(name, Estimand.ATE, None, aipw_ate(data, prop, features, t, c))]
    if tag.method is Method.IPW_HT:
        value = ipw_ate(data, prop, t, c, normalized=False)
        return [Estimate(name, Estimand.ATE, None, value)]

    out = [Estimate(name, Estimand.ATE, None, ipw_ate(data, prop, t, c))]
    report = ipw_qtet(data, prop, t, c, ctx.probs)
    out.extend(
        Estimate(name, Estimand.QTET, p, v)
        for p, v in zip(report.probs, report.values, strict=True)
    )
    return out
