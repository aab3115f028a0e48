"""
Unit tests for run configuration documents.

Purpose: Ensure configuration JSON is validated key by key and that
command-line overrides replace only what they name.
"""

import json

import pytest

from src.cli.config import (
    ReplicationSettings,
    RunConfig,
    load_run_config,
    parse_run_config,
)
from src.counterfactual.cdf import QueryError
from src.datagen.families import Family
from src.model.spec import SpecError
from src.solver.config import Algorithm
from src.utils.config import ConfigurationError

MODEL = {
    "basis": ["identity", "square"],
    "features": ["intercept", {"raw": 0}, {"squared": 0}, {"raw": 1}],
    "treatment_levels": ["0", "1"],
}


class TestParseRunConfig:
    """Test parse_run_config."""

    def test_full_document(self):
        config = parse_run_config(
            {
                "model": MODEL,
                "solver": {"algorithm": "iterative", "outer_tol": 1e-7},
                "estimators": ["DRM", "IPW"],
                "probs": [0.1, 0.5],
                "treated": "1",
                "control": "0",
                "replication": {"family": "gamma", "n": 500, "repetitions": 10},
                "data": {"outcome": "income", "covariates": ["age"], "levels": ["0", "1"]},
            }
        )
        assert config.model is not None
        assert config.model.features.labels == ["1", "x1", "x1^2", "x2"]
        assert config.solver.algorithm is Algorithm.ITERATIVE
        assert config.solver.outer_tol == 1e-7
        assert config.estimators == ("DRM", "IPW")
        assert config.probs == (0.1, 0.5)
        assert config.replication.family is Family.GAMMA
        assert config.replication.base_seed == 0
        assert config.columns.outcome == "income"
        assert config.columns.covariates == ("age",)
        assert config.levels == ("0", "1")

    def test_defaults(self):
        config = parse_run_config({})
        assert config.model is None
        assert config.solver.algorithm is Algorithm.MARGINAL_APPROX
        assert (config.treated, config.control) == (2, 1)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigurationError) as exc:
            parse_run_config({"modle": MODEL})
        assert "modle" in str(exc.value)

    def test_unknown_solver_setting(self):
        with pytest.raises(SpecError):
            parse_run_config({"solver": {"tolerance": 1e-3}})

    def test_unknown_replication_setting(self):
        with pytest.raises(ConfigurationError):
            parse_run_config({"replication": {"reps": 3}})

    def test_bad_estimator(self):
        with pytest.raises(ConfigurationError):
            parse_run_config({"estimators": ["Lasso"]})

    def test_bad_probs(self):
        with pytest.raises(QueryError):
            parse_run_config({"probs": [0.5, 1.5]})

    def test_bad_replication_values(self):
        with pytest.raises(ConfigurationError):
            ReplicationSettings(n=1)


class TestLoadRunConfig:
    """Test reading configuration files."""

    def test_none_gives_defaults(self):
        assert load_run_config(None) == RunConfig()

    def test_reads_file(self, temp_dir):
        path = temp_dir / "run.json"
        path.write_text(json.dumps({"model": MODEL, "probs": [0.5]}))
        config = load_run_config(path)
        assert config.probs == (0.5,)

    def test_missing_file(self, temp_dir):
        with pytest.raises(ConfigurationError):
            load_run_config(temp_dir / "absent.json")

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
    def test_malformed(self, temp_dir, text):
        path = temp_dir / "run.json"
        path.write_text(text)
        with pytest.raises(ConfigurationError):
            load_run_config(path)


class TestOverrides:
    """Test with_overrides."""

    def test_none_values_ignored(self):
        base = RunConfig(probs=(0.25, 0.75))
        changed = base.with_overrides(probs=None, treated="1")
        assert changed.probs == (0.25, 0.75)
        assert changed.treated == "1"
