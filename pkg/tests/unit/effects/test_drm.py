"""
Unit tests for effects read off a fitted density ratio model.

Purpose: Ensure ATE, CATE and QTET are the advertised functionals of the
fitted counterfactual laws.
"""

import numpy as np
import pytest

from src.counterfactual.cdf import QueryError, quantile
from src.counterfactual.estimators import (
    Subpopulation,
    conditional_mean,
    marginal_counterfactual_cdf,
)
from src.effects.drm import drm_ate, drm_cate, drm_cate_report, drm_qtet
from src.effects.models import Estimand


class TestDrmCate:
    """Test conditional effects."""

    def test_difference_of_conditional_means(self, gaussian_fit):
        """Purpose: Verify CATE is the gap between conditional means at x."""
        x = [0.4, -0.2]
        expected = conditional_mean(gaussian_fit, x, 2) - conditional_mean(gaussian_fit, x, 1)
        assert drm_cate(gaussian_fit, x, "1", "0") == pytest.approx(expected, rel=1e-12)

    def test_report_per_point(self, gaussian_fit):
        """Purpose: Verify the report holds one value per covariate point."""
        points = [[0.0, 0.0], [1.0, 0.5], [-1.0, 2.0]]
        report = drm_cate_report(gaussian_fit, points, "1", "0")

        assert report.estimand is Estimand.CATE
        assert report.points == ((0.0, 0.0), (1.0, 0.5), (-1.0, 2.0))
        singles = [drm_cate(gaussian_fit, p, "1", "0") for p in points]
        np.testing.assert_allclose(report.values, singles, rtol=1e-10)

    def test_same_level(self, gaussian_fit):
        """Purpose: Verify a self-contrast is zero."""
        assert drm_cate(gaussian_fit, [1.0, 1.0], 1, 1) == 0.0
        assert drm_cate_report(gaussian_fit, [[1.0, 1.0]], 2, 2).values == (0.0,)


class TestDrmAte:
    """Test the averaged effect."""

    def test_average_of_cate(self, gaussian_fit, gaussian_data):
        """Purpose: Verify ATE averages the CATE over every unit."""
        report = drm_cate_report(gaussian_fit, gaussian_data.x, "1", "0")
        value = drm_ate(gaussian_fit, gaussian_data, "1", "0")
        assert value == pytest.approx(np.mean(report.values), rel=1e-12)

    def test_antisymmetric(self, gaussian_fit, gaussian_data):
        """Purpose: Verify swapping treated and control flips the sign."""
        forward = drm_ate(gaussian_fit, gaussian_data, 2, 1)
        backward = drm_ate(gaussian_fit, gaussian_data, 1, 2)
        assert forward == pytest.approx(-backward, rel=1e-12)


class TestDrmQtet:
    """Test the quantile effect on the treated."""

    def test_quantile_differences(self, gaussian_fit, gaussian_data):
        """Purpose: Verify QTET differences quantiles of the two treated-mixture laws."""
        probs = [0.25, 0.5, 0.75]
        report = drm_qtet(gaussian_fit, gaussian_data, "1", "0", probs)

        over = Subpopulation.level(2)
        f1 = marginal_counterfactual_cdf(gaussian_fit, gaussian_data, 2, over)
        f0 = marginal_counterfactual_cdf(gaussian_fit, gaussian_data, 1, over)
        expected = [quantile(f1, p) - quantile(f0, p) for p in probs]

        assert report.estimand is Estimand.QTET
        assert report.probs == (0.25, 0.5, 0.75)
        np.testing.assert_allclose(report.values, expected)

    def test_same_level(self, gaussian_fit, gaussian_data):
        """Purpose: Verify a self-contrast is zero at every level."""
        report = drm_qtet(gaussian_fit, gaussian_data, 1, 1, [0.5])
        assert report.values == (0.0,)

    def test_invalid_probs(self, gaussian_fit, gaussian_data):
        """Purpose: Verify decreasing probability levels are rejected."""
        with pytest.raises(QueryError):
            drm_qtet(gaussian_fit, gaussian_data, "1", "0", [0.9, 0.1])
