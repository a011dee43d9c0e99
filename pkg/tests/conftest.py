"""Fixtures for swapsim tests."""

from pathlib import Path

import pytest

from swapsim.config import build_run_config, load_airframe, load_gains, load_sensor_spec
from swapsim.const import CONF_DURATION, CONF_OUTPUT_DIR, CONF_RUN_COUNT, CONF_SCENARIO


def pytest_addoption(parser):
    """Add --full-runs option for full-length simulation tests."""
    parser.addoption(
        "--full-runs",
        action="store_true",
        default=False,
        help="run full-length scenarios and Monte Carlo batches",
    )


@pytest.fixture(scope="session")
def full_runs(request):
    """Return whether full-length runs are enabled."""
    return request.config.getoption("--full-runs")


def skip_without_full_runs(full_runs):
    """Skip a test unless --full-runs was given."""
    if not full_runs:
        pytest.skip("No --full-runs specified")


@pytest.fixture(scope="session")
def airframe():
    """Return the packaged airframe definition."""
    return load_airframe()


@pytest.fixture(scope="session")
def gains():
    """Return the packaged autopilot gains."""
    return load_gains()


@pytest.fixture(scope="session")
def sensor_spec():
    """Return the packaged sensor specification."""
    return load_sensor_spec()


@pytest.fixture
def short_config(tmp_path: Path):
    """Return a two-run scenario 2 configuration cut short, writing into tmp_path."""
    return build_run_config(
        {
            CONF_SCENARIO: "2",
            CONF_RUN_COUNT: "2",
            CONF_DURATION: "2",
            CONF_OUTPUT_DIR: str(tmp_path / "output"),
        }
    )
