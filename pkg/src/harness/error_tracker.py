"""
Failure tracking for replication studies.

Failed (repetition, estimator) pairs are kept in a backlog so a study can
report how many repetitions each estimator lost and why.
"""

import logging
from datetime import datetime
from typing import Any

from src.utils.errors import DrmError

logger = logging.getLogger(__name__)


class ErrorTracker:
    """Tracks estimator failures and keeps a backlog of them."""

    def __init__(self) -> None:
        self._errors: list[dict[str, Any]] = []
        self._error_counts: dict[str, int] = {}

    def record_error(
        self,
        seed: int,
        estimator: str,
        error: Exception | None = None,
        *,
        error_type: str | None = None,
        error_code: str | None = None,
        error_message: str | None = None,
    ) -> None:
        """
        Record one estimator failure on one repetition.

        Either pass the exception, or its type, code and message when it was
        raised in another process.
        """
        if error is not None:
            error_type = type(error).__name__
            error_code = error.code if isinstance(error, DrmError) else "UNEXPECTED"
            error_message = str(error)
        error_entry = {
            "seed": seed,
            "estimator": estimator,
            "error_type": error_type or "Exception",
            "error_code": error_code or "UNEXPECTED",
            "error_message": error_message or "",
            "timestamp": datetime.now().isoformat(),
        }
        self._errors.append(error_entry)

        code = str(error_entry["error_code"])
        self._error_counts[code] = self._error_counts.get(code, 0) + 1

        logger.error(
            f"{estimator} failed on seed {seed}: "
            f"[{error_entry['error_code']}] {error_entry['error_message']}"
        )

    def failures_for(self, estimator: str) -> int:
        return sum(1 for e in self._errors if e["estimator"] == estimator)

    def absorb(self, other: "ErrorTracker") -> None:
        """Append another tracker's failures without logging them again."""
        self._errors.extend(other._errors)
        for code, count in other._error_counts.items():
            self._error_counts[code] = self._error_counts.get(code, 0) + count

    def get_backlog(self) -> list[dict[str, Any]]:
        return self._errors.copy()

    def get_error_stats(self) -> dict[str, Any]:
        """
        Get failure statistics and the most recent failures.

        Returns:
            Dictionary with total_errors, error_codes and recent_errors
        """
        return {
            "total_errors": len(self._errors),
            "error_codes": self._error_counts.copy(),
            "recent_errors": self._errors[-10:] if self._errors else [],
        }

    def clear_backlog(self) -> None:
        self._errors.clear()
        self._error_counts.clear()
        logger.info("Failure backlog cleared")
