"""
Seeded synthetic data for the four simulation families and their true
effects.
"""

from .families import (
    LABELS,
    DgpSpec,
    Family,
    UnitDraws,
    UnsupportedFamilyError,
    draw_units,
    generate,
    parse_family,
)
from .rng import BLOCK_UNITS, block_generator, check_seed
from .truth import (
    ORACLE_TOLERANCE,
    CateFormula,
    MonteCarloTruth,
    TrueEffects,
    cate_formula,
    monte_carlo_truth,
    true_cate,
    true_effects,
)

__all__ = [
    "BLOCK_UNITS",
    "LABELS",
    "ORACLE_TOLERANCE",
    "CateFormula",
    "DgpSpec",
    "Family",
    "MonteCarloTruth",
    "TrueEffects",
    "UnitDraws",
    "UnsupportedFamilyError",
    "block_generator",
    "cate_formula",
    "check_seed",
    "draw_units",
    "generate",
    "monte_carlo_truth",
    "parse_family",
    "true_cate",
    "true_effects",
]
