"""
Unit tests for step-function CDFs and quantile inversion.

Purpose: Ensure CDFs merge atoms, evaluate right-continuously and invert
to the left-continuous generalized inverse.
"""

import numpy as np
import pytest

from src.counterfactual.cdf import CounterfactualCdf, QueryError, quantile, weighted_quantile


class TestCounterfactualCdf:
    """Test CDF construction and evaluation."""

    def setup_method(self):
        """Set up test fixtures."""
        self.cdf = CounterfactualCdf(
            atoms=np.array([1.0, 2.0, 3.0]), masses=np.array([0.2, 0.3, 0.5]), level=1
        )

    def test_evaluate_right_continuous(self):
        """Purpose: Verify F jumps at each atom and is flat in between."""
        values = self.cdf.evaluate([0.5, 1.0, 1.5, 2.0, 3.0, 10.0])
        np.testing.assert_allclose(values, [0.0, 0.2, 0.2, 0.5, 1.0, 1.0])

    def test_mean(self):
        """Purpose: Verify the mean is the mass-weighted atom average."""
        assert self.cdf.mean() == pytest.approx(0.2 + 0.6 + 1.5)

    def test_duplicates_merged(self):
        """Purpose: Verify repeated atoms pool their mass."""
        cdf = CounterfactualCdf.from_weighted_atoms([2.0, 1.0, 2.0], [0.25, 0.5, 0.25], level=2)
        np.testing.assert_array_equal(cdf.atoms, [1.0, 2.0])
        np.testing.assert_allclose(cdf.masses, [0.5, 0.5])

    def test_empirical(self):
        """Purpose: Verify the empirical CDF puts 1/n on each observation."""
        cdf = CounterfactualCdf.empirical([3.0, 1.0, 2.0, 1.0], level=1)
        np.testing.assert_allclose(cdf.masses, [0.5, 0.25, 0.25])
        assert cdf.cumulative[-1] == pytest.approx(1.0)

    def test_masses_must_sum_to_one(self):
        """Purpose: Verify unnormalized masses are rejected without normalize."""
        with pytest.raises(ValueError):
            CounterfactualCdf.from_weighted_atoms([1.0, 2.0], [1.0, 1.0], level=1)

    def test_atoms_must_increase(self):
        """Purpose: Verify the direct constructor needs sorted distinct atoms."""
        with pytest.raises(ValueError):
            CounterfactualCdf(np.array([2.0, 1.0]), np.array([0.5, 0.5]), level=1)


class TestQuantile:
    """Test the generalized inverse."""

    def setup_method(self):
        """Set up test fixtures."""
        self.cdf = CounterfactualCdf(
            atoms=np.array([1.0, 2.0, 3.0]), masses=np.array([0.2, 0.3, 0.5]), level=1
        )

    def test_left_continuous_inverse(self):
        """Purpose: Verify Q(p) = inf{y : F(y) >= p} at and between jumps."""
        assert quantile(self.cdf, 0.2) == 1.0
        assert quantile(self.cdf, 0.21) == 2.0
        assert quantile(self.cdf, 0.5) == 2.0
        assert quantile(self.cdf, 0.51) == 3.0
        assert quantile(self.cdf, 0.999) == 3.0

    @pytest.mark.parametrize("prob", [0.0, 1.0, -0.1, 1.5])
    def test_outside_unit_interval(self, prob):
        """Purpose: Verify probabilities outside (0, 1) are invalid queries."""
        with pytest.raises(QueryError) as exc:
            quantile(self.cdf, prob)
        assert exc.value.code == "INVALID_QUERY"

    def test_weighted_quantile(self):
        """Purpose: Verify weights shift the median toward heavy observations."""
        y = [1.0, 2.0, 3.0, 4.0]
        assert weighted_quantile(y, [1.0, 1.0, 1.0, 1.0], 0.5) == 2.0
        assert weighted_quantile(y, [1.0, 1.0, 1.0, 5.0], 0.5) == 4.0

    def test_matches_numpy_inverted_cdf(self, seeded_rng):
        """Purpose: Verify the empirical quantile agrees with numpy's inverted_cdf."""
        y = seeded_rng.normal(size=101)
        cdf = CounterfactualCdf.empirical(y, level=1)
        for prob in (0.1, 0.3, 0.5, 0.7, 0.9):
            assert quantile(cdf, prob) == np.quantile(y, prob, method="inverted_cdf")
