"""
Unit tests for failure tracking in replication studies.

Purpose: Ensure failures are recorded with their codes, counted per
estimator and summarized in the statistics.
"""

from src.effects.propensity import SeparationError
from src.harness.error_tracker import ErrorTracker
from src.solver.state import SolverError


class TestErrorTracker:
    """Test ErrorTracker class."""

    def setup_method(self):
        """Set up test fixtures."""
        self.error_tracker = ErrorTracker()

    def test_initialization(self):
        """Purpose: Verify ErrorTracker initializes with empty state."""
        assert len(self.error_tracker.get_backlog()) == 0
        assert self.error_tracker.get_error_stats()["total_errors"] == 0

    def test_record_single_error(self):
        """Purpose: Verify a library error is recorded with its code."""
        self.error_tracker.record_error(7, "IPW(full)", SeparationError("separated"))

        backlog = self.error_tracker.get_backlog()
        assert len(backlog) == 1
        error_entry = backlog[0]
        assert error_entry["seed"] == 7
        assert error_entry["estimator"] == "IPW(full)"
        assert error_entry["error_type"] == "SeparationError"
        assert error_entry["error_code"] == "SEPARATION"
        assert error_entry["error_message"] == "separated"
        assert "timestamp" in error_entry

    def test_record_from_parts(self):
        """Purpose: Verify failures shipped from a worker process are recorded as given."""
        self.error_tracker.record_error(
            3,
            "DRM(full)",
            error_type="SolverError",
            error_code="SOLVER_FAILURE",
            error_message="stalled",
        )
        assert self.error_tracker.get_backlog()[0]["error_code"] == "SOLVER_FAILURE"

    def test_unexpected_errors(self):
        """Purpose: Verify exceptions outside the library hierarchy are coded UNEXPECTED."""
        self.error_tracker.record_error(1, "AIPW(full)", ValueError("bad"))
        assert self.error_tracker.get_error_stats()["error_codes"] == {"UNEXPECTED": 1}

    def test_error_stats_calculation(self):
        """Purpose: Verify counts per code and per estimator."""
        self.error_tracker.record_error(1, "DRM(full)", SolverError("a"))
        self.error_tracker.record_error(2, "DRM(full)", SolverError("b"))
        self.error_tracker.record_error(2, "IPW(full)", SeparationError("c"))

        stats = self.error_tracker.get_error_stats()
        assert stats["total_errors"] == 3
        assert stats["error_codes"] == {"SOLVER_FAILURE": 2, "SEPARATION": 1}
        assert self.error_tracker.failures_for("DRM(full)") == 2
        assert self.error_tracker.failures_for("G-formula(full)") == 0

    def test_recent_errors_limited(self):
        """Purpose: Verify statistics keep only the ten most recent failures."""
        for seed in range(15):
            self.error_tracker.record_error(seed, "IPW(full)", SolverError("x"))
        recent = self.error_tracker.get_error_stats()["recent_errors"]
        assert len(recent) == 10
        assert recent[0]["seed"] == 5

    def test_clear_backlog(self):
        """Purpose: Verify clearing removes failures and counts."""
        self.error_tracker.record_error(1, "IPW(full)", SolverError("x"))
        self.error_tracker.clear_backlog()
        assert self.error_tracker.get_backlog() == []
        assert self.error_tracker.get_error_stats()["error_codes"] == {}

    def test_absorb(self):
        """Purpose: Verify another tracker's failures are appended with their codes."""
        self.error_tracker.record_error(1, "DRM(full)", SolverError("a"))
        other = ErrorTracker()
        other.record_error(2, "DRM(full)", SolverError("b"))
        other.record_error(2, "IPW(full)", SeparationError("c"))

        self.error_tracker.absorb(other)

        assert self.error_tracker.failures_for("DRM(full)") == 2
        assert self.error_tracker.get_error_stats()["error_codes"] == {
            "SOLVER_FAILURE": 2,
            "SEPARATION": 1,
        }
        assert other.get_error_stats()["total_errors"] == 2
