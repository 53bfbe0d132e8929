from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from espnor.config import OptimizerConfig, RunConfig
from espnor.model_io import generate_synthetic_instance, load_instance
from espnor.pipeline import prepare_pipeline

settings.register_profile("repo", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def inst_2e2o():
    return load_instance(DATA / "synthetic_2e2o.json")


@pytest.fixture(scope="session")
def inst_4e4o():
    return load_instance(DATA / "synthetic_4e4o.json")


@pytest.fixture(scope="session")
def prep_4e4o(inst_4e4o):
    return prepare_pipeline(inst_4e4o, RunConfig(optimizer=OptimizerConfig(restarts=2)))


@pytest.fixture(scope="session")
def prep_2e2o(inst_2e2o):
    return prepare_pipeline(inst_2e2o, RunConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_instances(count, *, start=0):
    """Synthetic instances cycling over a few (n_ao, n_act) shapes."""
    shapes = [(4, 4), (5, 4), (6, 4), (3, 2), (4, 2), (6, 3)]
    return [generate_synthetic_instance(*shapes[k % len(shapes)], start + k) for k in range(count)]


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, format_line

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(format_line(n))
