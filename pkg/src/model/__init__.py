"""
Core model types: outcome basis, covariate features, model specification,
datasets and fitted parameters.
"""

from .basis import (
    BasisSpec,
    BasisTerm,
    SpecError,
    SupportDomainError,
    eval_basis,
    parse_basis,
)
from .dataset import DataValidationError, Dataset
from .features import FeatureKind, FeatureMap, FeatureTerm, eval_beta
from .params import DrmFit, FitDiagnostics, ThetaParams
from .spec import ModelSpec
from .tilt import InfeasibleStateError, compute_alpha

__all__ = [
    "BasisSpec",
    "BasisTerm",
    "DataValidationError",
    "Dataset",
    "DrmFit",
    "FeatureKind",
    "FeatureMap",
    "FeatureTerm",
    "FitDiagnostics",
    "InfeasibleStateError",
    "ModelSpec",
    "SpecError",
    "SupportDomainError",
    "ThetaParams",
    "compute_alpha",
    "eval_basis",
    "eval_beta",
    "parse_basis",
]
