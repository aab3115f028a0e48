"""
Unit tests for plot-data tables.
"""

import pandas as pd
import pytest

from src.counterfactual.cdf import QueryError
from src.datagen.families import Family
from src.harness.plot_data import PlotKind, covariate_grid, emit_plot_data


class TestCovariateGrid:
    """Test grid construction."""

    def test_two_covariates(self, gaussian_data):
        points = covariate_grid(gaussian_data, 20)
        assert points.shape == (400, 2)

    def test_one_covariate(self, tiny_dataset):
        points = covariate_grid(tiny_dataset, 3)
        assert points.shape == (3, 1)
        assert points[0, 0] < points[-1, 0]

    def test_size(self, gaussian_data):
        with pytest.raises(QueryError):
            covariate_grid(gaussian_data, 1)


class TestEmitPlotData:
    """Test emit_plot_data."""

    def test_cate_grid(self, gaussian_fit, gaussian_data, temp_dir):
        """Purpose: Verify a 20 x 20 grid with the closed-form truth alongside."""
        paths = emit_plot_data(
            gaussian_fit,
            PlotKind.CATE_GRID,
            temp_dir,
            data=gaussian_data,
            treated="1",
            control="0",
            family=Family.GAUSSIAN,
        )
        frame = pd.read_csv(paths[0])
        assert len(frame) == 400
        assert list(frame.columns) == ["x1", "x2", "cate", "truth"]

    def test_cdf_overlay(self, gaussian_fit, gaussian_data, temp_dir):
        paths = emit_plot_data(gaussian_fit, "cdf-overlay", temp_dir, data=gaussian_data)
        assert [p.name for p in paths] == ["cdf_overlay_level_0.csv", "cdf_overlay_level_1.csv"]
        frame = pd.read_csv(paths[1])
        assert frame["cdf"].iloc[-1] == pytest.approx(1.0)
        assert frame["y"].is_monotonic_increasing

    def test_unknown_kind(self, gaussian_fit, temp_dir):
        with pytest.raises(QueryError):
            emit_plot_data(gaussian_fit, "histogram", temp_dir)

    def test_kind_needs_matching_source(self, gaussian_fit, gaussian_data, temp_dir):
        with pytest.raises(QueryError):
            emit_plot_data(gaussian_fit, "boxplot-raw", temp_dir, data=gaussian_data)
        with pytest.raises(QueryError):
            emit_plot_data(gaussian_fit, "cate-grid", temp_dir)
