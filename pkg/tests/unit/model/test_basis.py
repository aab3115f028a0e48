"""
Unit tests for the outcome basis and the exponential-tilt normalizer.

Purpose: Ensure basis evaluation, support checks and the normalizing
constant behave as documented.
"""

import math

import numpy as np
import pytest

from src.model.basis import (
    BasisSpec,
    BasisTerm,
    SpecError,
    SupportDomainError,
    eval_basis,
    parse_basis,
)
from src.model.tilt import InfeasibleStateError, compute_alpha


class TestBasisSpec:
    """Test BasisSpec construction and evaluation."""

    def test_identity_square_at_two(self):
        """Purpose: Verify q(2) = (2, 4) for the quadratic basis."""
        basis = BasisSpec.of("identity", "square")
        np.testing.assert_allclose(eval_basis(basis, 2.0), [2.0, 4.0])

    def test_identity_log_at_one(self):
        """Purpose: Verify q(1) = (1, 0) for the (y, log y) basis."""
        basis = BasisSpec.of("identity", "log")
        np.testing.assert_allclose(eval_basis(basis, 1.0), [1.0, 0.0])

    def test_sqrt_rejects_negative(self):
        """Purpose: Verify a sqrt basis rejects y < 0 with a support error."""
        basis = BasisSpec.of("sqrt")
        with pytest.raises(SupportDomainError) as exc:
            eval_basis(basis, -1.0)
        assert exc.value.code == "SUPPORT_DOMAIN"
        assert exc.value.details["value"] == -1.0

    def test_sqrt_accepts_zero(self):
        """Purpose: Verify count data with zeros is inside the sqrt support."""
        basis = BasisSpec.of("sqrt", "identity")
        np.testing.assert_allclose(basis.evaluate([0.0, 4.0]), [[0.0, 0.0], [2.0, 4.0]])

    def test_log_rejects_zero(self):
        """Purpose: Verify a log basis needs strictly positive outcomes."""
        basis = BasisSpec.of("identity", "log")
        with pytest.raises(SupportDomainError):
            basis.check_support([1.0, 0.0, 2.0])

    def test_log_abs_rejects_zero_only(self):
        """Purpose: Verify log|y| allows negative outcomes but not zero."""
        basis = BasisSpec.of("log_abs")
        np.testing.assert_allclose(basis.evaluate([-math.e]), [[1.0]])
        with pytest.raises(SupportDomainError):
            basis.evaluate([0.0])

    def test_evaluate_shape(self):
        """Purpose: Verify evaluate returns an (n, d) matrix in component order."""
        basis = BasisSpec.of("square", "identity", "sqrt_abs")
        out = basis.evaluate([1.0, -4.0])
        assert out.shape == (2, 3)
        np.testing.assert_allclose(out[1], [16.0, -4.0, 2.0])

    def test_support_flags(self):
        """Purpose: Verify positive_only and nonnegative_only follow the components."""
        assert BasisSpec.of("identity", "log").positive_only
        assert not BasisSpec.of("identity", "square").positive_only
        assert BasisSpec.of("sqrt").nonnegative_only

    def test_empty_basis_rejected(self):
        """Purpose: Verify a basis needs at least one component."""
        with pytest.raises(SpecError):
            BasisSpec(())

    def test_duplicate_components_rejected(self):
        """Purpose: Verify repeated components are a spec error."""
        with pytest.raises(SpecError):
            BasisSpec((BasisTerm.IDENTITY, BasisTerm.IDENTITY))

    def test_parse_unknown_term(self):
        """Purpose: Verify parse_basis names unknown terms as a spec error."""
        with pytest.raises(SpecError) as exc:
            parse_basis(["identity", "cube"])
        assert exc.value.code == "INVALID_SPEC"

    def test_names_round_trip(self):
        """Purpose: Verify the names list parses back to the same basis."""
        basis = BasisSpec.of("sqrt", "identity")
        assert parse_basis(basis.names) == basis


class TestComputeAlpha:
    """Test the tilt normalizer."""

    def test_symmetric_two_atoms(self):
        """Purpose: Verify alpha = -log cosh(1) for atoms +-1 with equal weights."""
        alpha = compute_alpha(BasisSpec.of("identity"), [0.5, 0.5], [1.0], [-1.0, 1.0])
        assert alpha == pytest.approx(-math.log(math.cosh(1.0)))
        assert alpha == pytest.approx(-0.43378, abs=1e-5)

    def test_zero_tilt_gives_zero(self):
        """Purpose: Verify alpha = 0 when beta = 0 and the weights sum to one."""
        alpha = compute_alpha(
            BasisSpec.of("identity", "square"), [0.2, 0.3, 0.5], [0.0, 0.0], [1.0, 2.0, 3.0]
        )
        assert alpha == pytest.approx(0.0, abs=1e-15)

    def test_center_shifts_alpha(self):
        """Purpose: Verify subtracting a centre c shifts alpha by beta^T c."""
        basis = BasisSpec.of("identity")
        plain = compute_alpha(basis, [0.5, 0.5], [0.7], [-1.0, 1.0])
        centred = compute_alpha(basis, [0.5, 0.5], [0.7], [-1.0, 1.0], center=[0.5])
        assert centred == pytest.approx(plain + 0.7 * 0.5)

    def test_large_exponents_are_stable(self):
        """Purpose: Verify a tilt of several hundred does not overflow."""
        alpha = compute_alpha(BasisSpec.of("identity"), [0.5, 0.5], [800.0], [0.0, 1.0])
        assert alpha == pytest.approx(-(800.0 + math.log(0.5)))

    def test_nonpositive_weight_rejected(self):
        """Purpose: Verify zero weights are an infeasible state."""
        with pytest.raises(InfeasibleStateError) as exc:
            compute_alpha(BasisSpec.of("identity"), [1.0, 0.0], [1.0], [0.0, 1.0])
        assert exc.value.code == "INFEASIBLE_STATE"
