"""
Unit tests for the logistic propensity model.

Purpose: Ensure IRLS recovers known coefficients, restricts multi-level fits
to the contrasted arms and reports separation and collinearity.
"""

import numpy as np
import pytest
from scipy.special import expit

from src.effects.models import PROB_CLIP
from src.effects.propensity import SeparationError, fit_propensity
from src.effects.regression import RankDeficiencyError
from src.model.dataset import Dataset
from src.model.features import FeatureMap, FeatureTerm


class TestFitPropensity:
    """Test fit_propensity."""

    def test_recovers_coefficients(self):
        """Purpose: Verify a large logistic sample recovers its intercept and slope."""
        rng = np.random.default_rng(31)
        x = rng.normal(size=(5000, 1))
        treated = rng.uniform(size=5000) < expit(0.5 - 1.0 * x[:, 0])
        data = Dataset.from_arrays(np.zeros(5000), np.where(treated, 2, 1), x, labels=("0", "1"))

        model = fit_propensity(data, FeatureMap.of(FeatureTerm.raw(0)), "1")

        assert model.converged
        assert model.terms == ("1", "x1")
        np.testing.assert_allclose(model.coefficients, [0.5, -1.0], atol=0.15)
        assert model.rows.shape == (5000,)

    def test_intercept_only_matches_share(self, tiny_dataset):
        """Purpose: Verify with no covariates pi_hat is the treated share."""
        model = fit_propensity(tiny_dataset, None, "1")
        np.testing.assert_allclose(model.probabilities, 0.5, atol=1e-9)
        assert model.treated == 2

    def test_intercept_term_not_duplicated(self, tiny_dataset):
        """Purpose: Verify an intercept in the feature map is folded into the design intercept."""
        model = fit_propensity(
            tiny_dataset, FeatureMap.of(FeatureTerm.intercept(), FeatureTerm.raw(0)), 2
        )
        assert model.terms == ("1", "x1")

    def test_multi_level_uses_contrasted_arms(self):
        """Purpose: Verify a three-level fit keeps only treated and control rows."""
        rng = np.random.default_rng(4)
        a = np.tile([1, 2, 3], 20)
        data = Dataset.from_arrays(rng.normal(size=60), a, rng.normal(size=(60, 1)))

        model = fit_propensity(data, None, 3, control=1)

        np.testing.assert_array_equal(model.rows, np.flatnonzero(a != 2))
        np.testing.assert_allclose(model.probabilities, 0.5, atol=1e-9)

    def test_separation(self):
        """Purpose: Verify a perfectly separating covariate raises SeparationError."""
        x = np.array([[-3.0], [-2.0], [-1.0], [1.0], [2.0], [3.0]])
        data = Dataset.from_arrays(np.zeros(6), [1, 1, 1, 2, 2, 2], x)

        with pytest.raises(SeparationError) as exc:
            fit_propensity(data, FeatureMap.of(FeatureTerm.raw(0)), 2)
        assert exc.value.code == "SEPARATION"

    def test_collinear_covariates(self, seeded_rng):
        """Purpose: Verify duplicated information in the design is reported by name."""
        x1 = seeded_rng.normal(size=40)
        x = np.column_stack([x1, 2.0 * x1])
        data = Dataset.from_arrays(np.zeros(40), np.tile([1, 2], 20), x)

        with pytest.raises(RankDeficiencyError) as exc:
            fit_propensity(data, FeatureMap.of(FeatureTerm.raw(0), FeatureTerm.raw(1)), 2)
        assert exc.value.code == "RANK_DEFICIENT"
        assert set(exc.value.details["collinear_terms"]) <= {"x1", "x2"}

    def test_probabilities_clipped(self):
        """Purpose: Verify fitted probabilities stay inside [clip, 1 - clip]."""
        rng = np.random.default_rng(12)
        x = rng.normal(size=(400, 1))
        treated = rng.uniform(size=400) < expit(3.0 * x[:, 0])
        data = Dataset.from_arrays(np.zeros(400), np.where(treated, 2, 1), x)

        model = fit_propensity(data, FeatureMap.of(FeatureTerm.raw(0)), 2)
        assert model.probabilities.min() >= PROB_CLIP
        assert model.probabilities.max() <= 1.0 - PROB_CLIP
