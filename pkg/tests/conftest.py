"""
Pytest configuration and shared fixtures for counterfactual-drm tests.

This file contains:
- Environment setup for testing
- Small seeded datasets
- Model specs and fitted models reused across test modules
"""

import os
import tempfile
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest
from dotenv import load_dotenv

from src.datagen.families import DgpSpec, Family, generate
from src.model.basis import BasisSpec
from src.model.dataset import Dataset
from src.model.features import FeatureMap, FeatureTerm
from src.model.params import DrmFit
from src.model.spec import ModelSpec
from src.solver.config import SolverConfig
from src.solver.mele import fit_mele


# Test Environment Setup
@pytest.fixture(scope="session", autouse=True)
def setup_test_environment():
    """Setup test environment variables and configurations."""
    test_env_path = Path(__file__).parent / ".env.test"
    if test_env_path.exists():
        load_dotenv(test_env_path)

    os.environ["TESTING"] = "true"
    for key in ("DRM_LOG_LEVEL", "DRM_WORKERS", "DRM_OUT_DIR", "DRM_DEBUG_LOGGING"):
        os.environ.pop(key, None)

    yield


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


# Model Fixtures
@pytest.fixture
def gaussian_spec() -> ModelSpec:
    """Quadratic basis with a linear feature map, levels "0" and "1"."""
    return ModelSpec(
        basis=BasisSpec.of("identity", "square"),
        features=FeatureMap.of(
            FeatureTerm.intercept(), FeatureTerm.raw(0), FeatureTerm.raw(1)
        ),
        treatment_levels=("0", "1"),
    )


@pytest.fixture
def tiny_dataset() -> Dataset:
    """Six hand-written observations in two groups with one covariate."""
    return Dataset.from_arrays(
        y=[0.5, 1.2, -0.3, 2.0, 2.7, 1.1],
        a=[1, 1, 1, 2, 2, 2],
        x=[[0.1], [0.4], [-0.2], [0.3], [0.9], [0.0]],
        labels=("0", "1"),
    )


@pytest.fixture(scope="session")
def gaussian_data() -> Dataset:
    """Seeded draw from the gaussian family, n=200."""
    return generate(DgpSpec(Family.GAUSSIAN, 200, 11))


@pytest.fixture(scope="session")
def gaussian_fit(gaussian_data) -> DrmFit:
    """Marginal-approx fit of the correctly specified gaussian model."""
    spec = ModelSpec(
        basis=BasisSpec.of("identity", "square"),
        features=FeatureMap.of(
            FeatureTerm.intercept(),
            FeatureTerm.raw(0),
            FeatureTerm.squared(0),
            FeatureTerm.raw(1),
        ),
        treatment_levels=("0", "1"),
    )
    return fit_mele(gaussian_data, spec, SolverConfig())


@pytest.fixture
def seeded_rng() -> np.random.Generator:
    """Fresh generator for ad-hoc test data."""
    return np.random.default_rng(2024)
