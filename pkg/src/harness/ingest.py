"""
CSV ingestion and export of observation tables.

The file has a header row; one column holds the outcome, one the treatment
label and the rest the covariates. Treatment labels map to levels 1..K in
first-appearance order unless an explicit order is given.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from src.model.dataset import DataValidationError, Dataset
from src.utils.errors import DrmError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class IngestError(DrmError):
    """Raised when an input table cannot be turned into a dataset."""

    code = "INGEST"


@dataclass(frozen=True)
class ColumnMapping:
    """Names of the outcome, treatment and covariate columns."""

    outcome: str = "y"
    treatment: str = "a"
    covariates: tuple[str, ...] = field(default=("x1", "x2"))

    def __post_init__(self) -> None:
        object.__setattr__(self, "covariates", tuple(self.covariates))
        names = [self.outcome, self.treatment, *self.covariates]
        if len(set(names)) != len(names):
            raise IngestError(f"Column mapping repeats a column: {names}")
        if not self.covariates:
            raise IngestError("At least one covariate column is required")

    @property
    def columns(self) -> list[str]:
        return [self.outcome, self.treatment, *self.covariates]


def _numeric_column(frame: pd.DataFrame, name: str) -> NDArray[np.float64]:
    """Parse one column exactly, reporting the first bad cell."""
    text = frame[name].str.strip()
    parsed = pd.to_numeric(text, errors="coerce")
    bad = parsed.isna().to_numpy() | ~np.isfinite(parsed.to_numpy(dtype=float))
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        cell = frame[name].iloc[row]
        raise IngestError(
            f"Non-numeric cell {cell!r} at row {row + 1} (line {row + 2}), column '{name}'",
            {"row": row + 1, "line": row + 2, "column": name, "value": cell},
        )
    return np.asarray(text.to_list(), dtype=float)


def ingest_csv(
    path: Path | str,
    mapping: ColumnMapping | None = None,
    levels: tuple[str, ...] | None = None,
) -> Dataset:
    """
    Read an observation table.

    Args:
        path: CSV file with a header row
        mapping: column roles; defaults to y, a, x1, x2
        levels: treatment labels in level order; first appearance when omitted

    Raises:
        IngestError: on missing files or columns, bad cells, unknown labels
                     or a level without units
    """
    mapping = mapping or ColumnMapping()
    path = Path(path)
    if not path.exists():
        raise IngestError(f"Input file not found: {path}", {"path": str(path)})
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, na_filter=False, skipinitialspace=True
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestError(f"Cannot parse {path}: {e}") from e

    missing = [c for c in mapping.columns if c not in frame.columns]
    if missing:
        raise IngestError(
            f"Missing columns {missing}; header has {list(frame.columns)}",
            {"missing": missing},
        )
    if frame.empty:
        raise IngestError(f"No data rows in {path}")

    y = _numeric_column(frame, mapping.outcome)
    x = np.column_stack([_numeric_column(frame, c) for c in mapping.covariates])

    raw = frame[mapping.treatment].str.strip()
    empty_rows = np.flatnonzero((raw == "").to_numpy())
    if empty_rows.size:
        row = int(empty_rows[0])
        raise IngestError(
            f"Empty treatment cell at row {row + 1} (line {row + 2}), "
            f"column '{mapping.treatment}'",
            {"row": row + 1, "line": row + 2, "column": mapping.treatment},
        )
    order = tuple(str(v) for v in levels) if levels else tuple(pd.unique(raw))
    index = {label: k for k, label in enumerate(order, start=1)}
    unknown = sorted(set(raw) - set(index))
    if unknown:
        raise IngestError(
            f"Treatment labels {unknown} are not among the levels {list(order)}",
            {"unknown": unknown},
        )
    a = raw.map(index).to_numpy(dtype=np.int64)

    try:
        data = Dataset.from_arrays(y, a, x, labels=order)
    except DataValidationError as e:
        raise IngestError(f"{path}: {e}", e.details) from e
    logger.info(f"Ingested {data.n} rows from {path}; levels {list(order)}, n_k={data.n_k}")
    return data


def export_csv(
    data: Dataset, path: Path | str, mapping: ColumnMapping | None = None
) -> Path:
    """Write a dataset in the ingestion schema; floats round-trip exactly."""
    mapping = mapping or ColumnMapping(
        covariates=tuple(f"x{j}" for j in range(1, data.p + 1))
    )
    if len(mapping.covariates) != data.p:
        raise IngestError(
            f"Mapping names {len(mapping.covariates)} covariates, data has {data.p}"
        )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({mapping.outcome: data.y})
    frame[mapping.treatment] = [data.labels[k - 1] for k in data.a]
    for j, name in enumerate(mapping.covariates):
        frame[name] = data.x[:, j]
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Exported {data.n} rows to {path}")
    return path
