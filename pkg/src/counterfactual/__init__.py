"""
Counterfactual distributions from a fitted density ratio model.
"""

from .cdf import CounterfactualCdf, QueryError, quantile, weighted_quantile
from .estimators import (
    Subpopulation,
    conditional_alpha,
    conditional_cdf,
    conditional_mean,
    conditional_means,
    log_density_ratio,
    marginal_counterfactual_cdf,
)
from .export import cdf_frame, read_cdf_csv, write_cdf_csv

__all__ = [
    "CounterfactualCdf",
    "QueryError",
    "Subpopulation",
    "cdf_frame",
    "conditional_alpha",
    "conditional_cdf",
    "conditional_mean",
    "conditional_means",
    "log_density_ratio",
    "marginal_counterfactual_cdf",
    "quantile",
    "read_cdf_csv",
    "weighted_quantile",
    "write_cdf_csv",
]
