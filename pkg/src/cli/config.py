"""
Run configuration for the command-line interface.

A run is described by an optional JSON document (--config). Command-line
flags override the document, which overrides DRM_* environment settings,
which override the defaults here.
"""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from src.datagen.families import Family, parse_family
from src.effects.models import DEFAULT_PROBS, check_probs
from src.harness.estimators import parse_tag
from src.harness.ingest import ColumnMapping
from src.model.spec import ModelSpec
from src.solver.config import SolverConfig
from src.utils.config import ConfigurationError

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "model",
    "solver",
    "estimators",
    "probs",
    "treated",
    "control",
    "replication",
    "data",
}


@dataclass(frozen=True)
class ReplicationSettings:
    """Replication block of a run configuration."""

    family: Family = Family.GAUSSIAN
    n: int = 1000
    repetitions: int = 100
    base_seed: int = 0
    workers: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", parse_family(self.family))
        if self.n < 2:
            raise ConfigurationError("replication.n must be at least 2")
        if self.repetitions < 1:
            raise ConfigurationError("replication.repetitions must be at least 1")
        if self.base_seed < 0:
            raise ConfigurationError("replication.base_seed must be nonnegative")
        if self.workers is not None and self.workers < 1:
            raise ConfigurationError("replication.workers must be positive")

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "ReplicationSettings":
        allowed = {"family", "n", "repetitions", "base_seed", "workers"}
        unknown = sorted(set(payload) - allowed)
        if unknown:
            raise ConfigurationError(f"Unknown replication settings: {unknown}")
        try:
            return cls(**payload)
        except TypeError as e:
            raise ConfigurationError(f"Invalid replication settings: {e}") from e


@dataclass(frozen=True)
class RunConfig:
    """Model, solver, estimators and study settings for one invocation."""

    model: ModelSpec | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    estimators: tuple[str, ...] = ()
    probs: tuple[float, ...] = DEFAULT_PROBS
    treated: str | int = 2
    control: str | int = 1
    replication: ReplicationSettings = field(default_factory=ReplicationSettings)
    columns: ColumnMapping = field(default_factory=ColumnMapping)
    levels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        for tag in self.estimators:
            parse_tag(tag)
        object.__setattr__(self, "probs", check_probs(self.probs))

    def with_overrides(self, **changes: Any) -> "RunConfig":
        """Copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _data_settings(payload: dict[str, Any]) -> tuple[ColumnMapping, tuple[str, ...] | None]:
    allowed = {"outcome", "treatment", "covariates", "levels"}
    unknown = sorted(set(payload) - allowed)
    if unknown:
        raise ConfigurationError(f"Unknown data settings: {unknown}")
    mapping = ColumnMapping(
        outcome=payload.get("outcome", "y"),
        treatment=payload.get("treatment", "a"),
        covariates=tuple(payload.get("covariates", ("x1", "x2"))),
    )
    levels = payload.get("levels")
    return mapping, tuple(str(v) for v in levels) if levels else None


def parse_run_config(payload: dict[str, Any]) -> RunConfig:
    """
    Validate a configuration document.

    Raises:
        ConfigurationError: on unknown keys or malformed values
        SpecError: on an invalid model or solver section
    """
    unknown = sorted(set(payload) - TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigurationError(f"Unknown configuration keys: {unknown}")
    config = RunConfig()
    changes: dict[str, Any] = {}
    if "model" in payload:
        changes["model"] = ModelSpec.from_dict(payload["model"])
    if "solver" in payload:
        changes["solver"] = SolverConfig.from_dict(payload["solver"])
    if "estimators" in payload:
        changes["estimators"] = tuple(str(t) for t in payload["estimators"])
    if "probs" in payload:
        changes["probs"] = tuple(float(p) for p in payload["probs"])
    for key in ("treated", "control"):
        if key in payload:
            changes[key] = payload[key]
    if "replication" in payload:
        changes["replication"] = ReplicationSettings.from_dict(payload["replication"])
    if "data" in payload:
        changes["columns"], changes["levels"] = _data_settings(payload["data"])
    try:
        return replace(config, **changes)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e


def load_run_config(path: Path | str | None) -> RunConfig:
    """Read and validate a JSON run configuration; defaults when path is None."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"Configuration file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Configuration is not valid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigurationError("Configuration must be a JSON object")
    config = parse_run_config(payload)
    logger.info(f"Loaded run configuration from {path}")
    return config
