"""
Replication studies, dataset ingestion and plot-data emission.
"""

from .error_tracker import ErrorTracker
from .estimators import (
    COMPARATOR_PRESETS,
    DRM_PRESETS,
    Estimate,
    EstimationContext,
    EstimatorTag,
    Method,
    parse_tag,
    preset_model,
    run_estimator,
)
from .ingest import ColumnMapping, IngestError, export_csv, ingest_csv
from .plot_data import PlotKind, covariate_grid, emit_plot_data
from .replication import (
    Aggregate,
    RepRecord,
    ReplicationPlan,
    SimStudyResult,
    run_replication,
    run_repetition,
)

__all__ = [
    "COMPARATOR_PRESETS",
    "DRM_PRESETS",
    "Aggregate",
    "ColumnMapping",
    "ErrorTracker",
    "Estimate",
    "EstimationContext",
    "EstimatorTag",
    "IngestError",
    "Method",
    "PlotKind",
    "RepRecord",
    "ReplicationPlan",
    "SimStudyResult",
    "covariate_grid",
    "emit_plot_data",
    "export_csv",
    "ingest_csv",
    "parse_tag",
    "preset_model",
    "run_estimator",
    "run_replication",
    "run_repetition",
]
