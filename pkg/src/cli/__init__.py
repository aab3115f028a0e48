"""
CLI module for counterfactual-drm.
"""

from .app import DrmApp

__all__ = ["DrmApp"]
