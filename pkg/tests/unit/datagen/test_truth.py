"""
Unit tests for true effects of the synthetic families.
"""

import pytest

from src.counterfactual.cdf import QueryError
from src.datagen.families import Family, UnsupportedFamilyError
from src.datagen.truth import (
    ORACLE_DRAWS,
    cate_formula,
    monte_carlo_truth,
    oracle_draws,
    true_cate,
    true_effects,
)
from src.effects.models import DEFAULT_PROBS


class TestTrueEffects:
    """Test published constants and their optional re-derivation."""

    def test_gaussian_constants(self):
        truth = true_effects("gaussian")
        assert truth.ate == 3.0
        assert truth.probs == DEFAULT_PROBS
        assert truth.qtet_at(0.5) == 4.444
        assert truth.monte_carlo is None
        assert "monte_carlo" not in truth.to_dict()

    def test_qtet_at_unknown_level(self):
        with pytest.raises(KeyError):
            true_effects(Family.GAMMA).qtet_at(0.4)

    def test_every_family_has_constants(self):
        for family in Family:
            truth = true_effects(family)
            assert len(truth.qtet) == len(DEFAULT_PROBS)

    def test_monte_carlo_recorded_not_substituted(self):
        """Purpose: Verify a re-derived ATE is stored next to the published one."""
        truth = true_effects("gaussian", monte_carlo=True, draws=200_000, seed=3)
        assert truth.ate == 3.0
        assert truth.monte_carlo is not None
        assert truth.monte_carlo.draws == 200_000
        assert truth.monte_carlo.ate == pytest.approx(3.0, abs=0.05)
        payload = truth.to_dict()
        assert payload["monte_carlo"]["seed"] == 3
        assert isinstance(payload["discrepancies"], list)

    def test_exponential_oracle_uses_more_draws(self):
        """Purpose: Verify the exponential oracle draws more units than the default count."""
        assert oracle_draws(Family.GAUSSIAN) == ORACLE_DRAWS
        assert oracle_draws(Family.EXPONENTIAL) > ORACLE_DRAWS

    def test_exponential_re_derivation(self):
        """Purpose: Verify the exponential ATE is recovered and every QTET level is negative."""
        mc = monte_carlo_truth(Family.EXPONENTIAL, 400_000, 9)
        assert mc.draws == 400_000
        assert mc.ate == pytest.approx(-2.063, abs=0.1)
        assert all(value < 0 for value in mc.qtet)


class TestTrueCate:
    """Test closed-form CATE."""

    def test_gaussian(self):
        """Purpose: Verify 1 + 2 x1 - x1^2 / 2 + x2 at (1, 2)."""
        assert true_cate("gaussian", [1.0, 2.0]) == pytest.approx(4.5)
        assert true_cate("gaussian", [0.0, 0.0]) == pytest.approx(1.0)

    def test_gamma(self):
        """Purpose: Verify 1.5 (x1 + 1) + x2 / 2 at (1, 2)."""
        assert true_cate("gamma", [1.0, 2.0]) == pytest.approx(4.0)

    def test_no_closed_form(self):
        with pytest.raises(UnsupportedFamilyError):
            true_cate("poisson", [0.0, 0.0])

    def test_point_size(self):
        with pytest.raises(QueryError):
            true_cate("gaussian", [1.0])

    def test_formula_labels(self):
        assert cate_formula("gaussian").to_dict() == {
            "1": 1.0,
            "x1": 2.0,
            "x1^2": -0.5,
            "x2": 1.0,
        }
