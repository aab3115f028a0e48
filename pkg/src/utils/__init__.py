"""
Utility modules for counterfactual-drm.
"""

from .config import (
    ConfigurationError,
    RuntimeSettings,
    load_settings,
    setup_logging,
    validate_settings,
)
from .errors import DrmError

__all__ = [
    "ConfigurationError",
    "DrmError",
    "RuntimeSettings",
    "load_settings",
    "setup_logging",
    "validate_settings",
]
