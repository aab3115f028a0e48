"""
Causal-effect estimators: DRM-based ATE, CATE and QTET plus the G-formula,
IPW, AIPW and IPW-quantile comparators.
"""

from .drm import drm_ate, drm_cate, drm_cate_report, drm_qtet
from .formatter import EffectFormatter
from .models import (
    DEFAULT_PROBS,
    EffectReport,
    Estimand,
    EstimationError,
    PropensityModel,
)
from .propensity import SeparationError, fit_propensity
from .regression import (
    OutcomeModel,
    RankDeficiencyError,
    fit_outcome_model,
    gformula_ate,
)
from .weighting import aipw_ate, hajek_weights, ipw_ate, ipw_qtet

__all__ = [
    "DEFAULT_PROBS",
    "EffectFormatter",
    "EffectReport",
    "Estimand",
    "EstimationError",
    "OutcomeModel",
    "PropensityModel",
    "RankDeficiencyError",
    "SeparationError",
    "aipw_ate",
    "drm_ate",
    "drm_cate",
    "drm_cate_report",
    "drm_qtet",
    "fit_outcome_model",
    "fit_propensity",
    "gformula_ate",
    "hajek_weights",
    "ipw_ate",
    "ipw_qtet",
]
