"""
Runtime configuration for counterfactual-drm.

This module loads process-level settings (logging, worker count, output
directory) from environment variables, optionally seeded from a .env file.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from src.utils.errors import DrmError

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigurationError(DrmError):
    """Raised when configuration is invalid or missing."""

    code = "CONFIG"


@dataclass
class RuntimeSettings:
    """Process-level settings shared by every command."""

    log_level: str = "WARNING"
    enable_debug_logging: bool = False
    workers: int = 1
    out_dir: Path = Path("out")


def load_settings(env_file: str | None = None) -> RuntimeSettings:
    """
    Load runtime settings from environment variables.

    Args:
        env_file: Optional path to a .env file. If None, a .env file in the
                  working directory is used when present.

    Returns:
        RuntimeSettings built from DRM_* variables

    Raises:
        ConfigurationError: If a value cannot be parsed
    """
    if env_file:
        env_path = Path(env_file)
        if not env_path.exists():
            raise ConfigurationError(f"Environment file not found: {env_file}")
        load_dotenv(env_path)
    elif Path(".env").exists():
        logger.info("Loading configuration from .env")
        load_dotenv(Path(".env"))

    try:
        settings = RuntimeSettings(
            log_level=os.getenv("DRM_LOG_LEVEL", "WARNING").upper(),
            enable_debug_logging=_get_bool_env("DRM_DEBUG_LOGGING", False),
            workers=_get_int_env("DRM_WORKERS", 1),
            out_dir=Path(os.getenv("DRM_OUT_DIR", "out")),
        )
    except (ValueError, TypeError) as e:
        raise ConfigurationError(f"Invalid configuration value: {e}") from e

    validate_settings(settings)
    return settings


def validate_settings(settings: RuntimeSettings) -> None:
    """
    Validate runtime settings.

    Raises:
        ConfigurationError: If a setting is out of range
    """
    if settings.log_level not in LOG_LEVELS:
        raise ConfigurationError(
            f"DRM_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, "
            f"got {settings.log_level!r}"
        )
    if settings.workers < 1:
        raise ConfigurationError("DRM_WORKERS must be positive")


def _get_bool_env(key: str, default: bool = False) -> bool:
    """Get boolean environment variable."""
    value = os.getenv(key, "").lower()
    if value in ("true", "1", "yes", "on"):
        return True
    elif value in ("false", "0", "no", "off"):
        return False
    else:
        return default


def _get_int_env(key: str, default: int) -> int:
    """Get integer environment variable."""
    value = os.getenv(key)
    if value is None or value.strip() == "":
        return default
    return int(value)


def setup_logging(settings: RuntimeSettings) -> None:
    """Setup logging based on settings."""
    level = getattr(logging, settings.log_level.upper(), logging.WARNING)

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    if settings.enable_debug_logging:
        logging.getLogger("src").setLevel(logging.DEBUG)

    logger.info(f"Logging configured at {settings.log_level} level")
