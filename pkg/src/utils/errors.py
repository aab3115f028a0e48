"""
Error base class shared by every stage of the estimation pipeline.

Each error carries a short machine-readable code that lands in JSON
reports and decides the CLI exit status.
"""

from typing import Any


class DrmError(Exception):
    """Base class for all library errors."""

    code = "DRM_ERROR"

    def __init__(self, message: str, details: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.details: dict[str, Any] = dict(details) if details else {}

    def to_dict(self) -> dict[str, Any]:
        """Serialize the error for a JSON report."""
        payload: dict[str, Any] = {"code": self.code, "message": str(self)}
        if self.details:
            payload["details"] = self.details
        return payload
