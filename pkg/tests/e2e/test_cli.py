"""
End-to-end tests for the counterfactual-drm command line.

These tests drive DrmApp.run exactly as the console script does: simulate a
dataset, fit it, estimate effects, run a small study and emit plot data,
checking files written and exit codes.
"""

import json

import pandas as pd
import pytest

from src.cli.app import DrmApp

pytestmark = pytest.mark.e2e

MODEL = {
    "basis": ["identity", "square"],
    "features": ["intercept", {"raw": 0}, {"squared": 0}, {"raw": 1}],
    "treatment_levels": ["0", "1"],
}


def run(*args: str) -> int:
    return DrmApp().run(list(args))


@pytest.fixture
def dataset(temp_dir):
    code = run("--seed", "7", "--out-dir", str(temp_dir), "simulate", "--family", "gaussian", "--n", "300")
    assert code == 0
    return temp_dir / "gaussian_n300_seed7.csv"


def write_config(temp_dir, **extra) -> str:
    path = temp_dir / "run.json"
    path.write_text(json.dumps({"model": MODEL, **extra}))
    return str(path)


class TestSimulate:
    """Test the simulate command."""

    def test_writes_dataset_and_truth(self, temp_dir, capsys):
        code = run(
            "--seed", "3", "--out-dir", str(temp_dir), "simulate", "--family", "gamma", "--n", "50", "--truth"
        )
        assert code == 0
        frame = pd.read_csv(temp_dir / "gamma_n50_seed3.csv")
        assert list(frame.columns) == ["y", "a", "x1", "x2"]
        assert len(frame) == 50
        truth = json.loads((temp_dir / "gamma_truth.json").read_text())
        assert truth["ate"] == 3.375
        assert "Simulated gamma data" in capsys.readouterr().out

    def test_unknown_family(self, temp_dir, capsys):
        code = run("--out-dir", str(temp_dir), "simulate", "--family", "cauchy")
        assert code == 2
        assert "UNSUPPORTED_FAMILY" in capsys.readouterr().err


class TestFit:
    """Test the fit command."""

    def test_report_and_cdfs(self, dataset, temp_dir):
        """Purpose: Verify the fit report and conditional and marginal CDF files."""
        out = temp_dir / "fit"
        code = run(
            "--config", write_config(temp_dir), "--out-dir", str(out),
            "fit", "--data", str(dataset), "--query", "1,2", "--marginal",
        )
        assert code == 0
        report = json.loads((out / "fit_report.json").read_text())
        assert report["status"] == "converged"
        assert report["data"]["n"] == 300
        assert report["data"]["labels"] == ["0", "1"]
        for name in (
            "cdf_level_0_point_1.csv",
            "cdf_level_1_point_1.csv",
            "cdf_level_0_marginal.csv",
            "cdf_level_1_marginal.csv",
        ):
            assert (out / name).exists()

    def test_freeze_theta(self, dataset, temp_dir):
        out = temp_dir / "frozen"
        code = run(
            "--config", write_config(temp_dir), "--out-dir", str(out),
            "fit", "--data", str(dataset), "--freeze-theta",
        )
        assert code == 0
        assert json.loads((out / "fit_report.json").read_text())["status"] == "frozen"

    def test_missing_model_section(self, dataset, temp_dir, capsys):
        code = run("--out-dir", str(temp_dir), "fit", "--data", str(dataset))
        assert code == 2
        assert "CONFIG" in capsys.readouterr().err

    def test_missing_data(self, temp_dir):
        code = run(
            "--config", write_config(temp_dir), "--out-dir", str(temp_dir),
            "fit", "--data", str(temp_dir / "absent.csv"),
        )
        assert code == 2
        report = json.loads((temp_dir / "fit_report.json").read_text())
        assert report["error"]["code"] == "INGEST"

    def test_solver_failure(self, dataset, temp_dir):
        """Purpose: Verify an exhausted outer budget exits with the solver status."""
        config = write_config(
            temp_dir,
            solver={"algorithm": "iterative", "outer_max_iter": 1, "outer_tol": 1e-14},
        )
        code = run("--config", config, "--out-dir", str(temp_dir), "fit", "--data", str(dataset))
        assert code == 3
        report = json.loads((temp_dir / "fit_report.json").read_text())
        assert report["status"] == "failed"
        assert report["error"]["code"] == "SOLVER_FAILURE"


class TestEffects:
    """Test the effects command."""

    def test_all_estimators(self, dataset, temp_dir, capsys):
        code = run(
            "--config", write_config(temp_dir), "--out-dir", str(temp_dir),
            "effects", "--data", str(dataset), "--treated", "1", "--control", "0",
            "--cate-point", "1,2", "--probs", "0.25,0.5",
        )
        assert code == 0
        payload = json.loads((temp_dir / "effects.json").read_text())
        seen = {(e["estimator"], e["estimand"]) for e in payload["effects"]}
        assert {("DRM", "ATE"), ("DRM", "QTET"), ("DRM", "CATE")} <= seen
        assert {("G-formula", "ATE"), ("IPW", "QTET"), ("AIPW", "ATE")} <= seen
        assert payload["n"] == 300
        assert "estimator" in capsys.readouterr().out


class TestReplicate:
    """Test the replicate command."""

    def test_tables_written(self, temp_dir, capsys):
        code = run(
            "--seed", "11", "--out-dir", str(temp_dir),
            "replicate", "--family", "gaussian", "--n", "200", "--repetitions", "2",
            "--estimators", "G-formula(full),IPW(full)",
        )
        assert code == 0
        frame = pd.read_csv(temp_dir / "replication_aggregates.csv")
        assert len(frame) == 7
        assert set(frame["count"]) == {2}
        assert "rmse" in capsys.readouterr().out

    def test_unknown_variant(self, temp_dir):
        code = run(
            "--out-dir", str(temp_dir), "replicate", "--family", "poisson",
            "--repetitions", "1", "--estimators", "DRM(mis1)",
        )
        assert code == 2


class TestPlotData:
    """Test the plot-data command."""

    def test_cate_grid(self, dataset, temp_dir):
        out = temp_dir / "plots"
        code = run(
            "--config", write_config(temp_dir), "--out-dir", str(out),
            "plot-data", "--kind", "cate-grid", "--data", str(dataset),
            "--grid-size", "5", "--truth-family", "gaussian", "--treated", "1", "--control", "0",
        )
        assert code == 0
        frame = pd.read_csv(out / "cate_grid.csv")
        assert len(frame) == 25
        assert "truth" in frame.columns

    def test_boxplot_raw(self, temp_dir):
        out = temp_dir / "plots"
        code = run(
            "--seed", "1", "--out-dir", str(out),
            "plot-data", "--kind", "boxplot-raw", "--family", "gaussian", "--n", "200",
            "--repetitions", "2", "--estimators", "G-formula(full)",
        )
        assert code == 0
        assert len(pd.read_csv(out / "boxplot_raw.csv")) == 2
