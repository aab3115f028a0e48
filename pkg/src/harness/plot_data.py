"""
Tidy CSV tables behind the usual figures: counterfactual CDF overlays, CATE
surfaces on a covariate grid, and raw replication estimates for boxplots.
"""

import logging
from enum import StrEnum
from pathlib import Path

import numpy as np
import pandas as pd

from src.counterfactual.cdf import QueryError
from src.counterfactual.estimators import Subpopulation, marginal_counterfactual_cdf
from src.datagen.families import Family
from src.datagen.truth import cate_formula
from src.effects.drm import drm_cate_report
from src.harness.replication import FLOAT_FORMAT, SimStudyResult
from src.model.dataset import Dataset
from src.model.params import DrmFit

logger = logging.getLogger(__name__)

GRID_LOWER = 5.0
GRID_UPPER = 95.0


class PlotKind(StrEnum):
    CDF_OVERLAY = "cdf-overlay"
    CATE_GRID = "cate-grid"
    BOXPLOT_RAW = "boxplot-raw"


def _write(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} plot rows to {path}")
    return path


def cdf_overlay(fit: DrmFit, data: Dataset, out_dir: Path) -> list[Path]:
    """One (y, cdf) file per level: the marginal law of Y(k) over all units."""
    paths = []
    for k, label in enumerate(fit.spec.treatment_levels, start=1):
        cdf = marginal_counterfactual_cdf(fit, data, k, Subpopulation.all_units())
        frame = pd.DataFrame({"y": cdf.atoms, "cdf": cdf.cumulative})
        paths.append(_write(frame, out_dir / f"cdf_overlay_level_{label}.csv"))
    return paths


def covariate_grid(data: Dataset, size: int) -> np.ndarray:
    """
    Rectangular grid over the first two covariates between their 5th and
    95th percentiles; other covariates sit at their medians.
    """
    if size < 2:
        raise QueryError("Grid size must be at least 2")
    x = data.x
    axes = [
        np.linspace(*np.percentile(x[:, j], [GRID_LOWER, GRID_UPPER]), size)
        for j in range(min(2, data.p))
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.tile(np.median(x, axis=0), (mesh[0].size, 1))
    for j, grid in enumerate(mesh):
        points[:, j] = grid.reshape(-1)
    return points


def cate_grid(
    fit: DrmFit,
    data: Dataset,
    out_dir: Path,
    treated: int | str,
    control: int | str,
    size: int = 20,
    family: Family | None = None,
) -> list[Path]:
    """CATE on a size x size grid, with the closed-form truth when known."""
    points = covariate_grid(data, size)
    report = drm_cate_report(fit, points, treated, control)
    frame = pd.DataFrame(points, columns=[f"x{j}" for j in range(1, data.p + 1)])
    frame["cate"] = report.values
    if family is not None and family in (Family.GAUSSIAN, Family.GAMMA) and data.p == 2:
        frame["truth"] = cate_formula(family).evaluate(points)
    return [_write(frame, out_dir / "cate_grid.csv")]


def boxplot_raw(result: SimStudyResult, out_dir: Path) -> list[Path]:
    """Every per-repetition estimate: R x estimators x estimands rows."""
    frame = result.records_frame()
    return [_write(frame, out_dir / "boxplot_raw.csv")]


def emit_plot_data(
    source: DrmFit | SimStudyResult,
    kind: PlotKind | str,
    out_dir: Path,
    *,
    data: Dataset | None = None,
    treated: int | str = 2,
    control: int | str = 1,
    grid_size: int = 20,
    family: Family | None = None,
) -> list[Path]:
    """
    Write the tidy table(s) for one plot kind.

    Raises:
        QueryError: on an unknown kind or a kind that does not fit the source
    """
    try:
        plot = PlotKind(kind)
    except ValueError as e:
        raise QueryError(
            f"Unknown plot kind {kind!r}; known: {[k.value for k in PlotKind]}"
        ) from e

    if plot is PlotKind.BOXPLOT_RAW:
        if not isinstance(source, SimStudyResult):
            raise QueryError("boxplot-raw needs a replication result")
        return boxplot_raw(source, out_dir)
    if not isinstance(source, DrmFit):
        raise QueryError(f"{plot} needs a fitted model")
    if data is None:
        raise QueryError(f"{plot} needs the dataset the model was fitted to")
    if plot is PlotKind.CDF_OVERLAY:
        return cdf_overlay(source, data, out_dir)
    return cate_grid(source, data, out_dir, treated, control, grid_size, family)
