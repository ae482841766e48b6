"""
Pytest configuration and fixtures for c2lab tests.
"""

import os
from pathlib import Path

import pytest
import structlog
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings

# Set test environment variables before importing c2lab
os.environ.setdefault("C2LAB_ENVIRONMENT", "development")
os.environ.setdefault("C2LAB_LOG_LEVEL", "WARNING")
os.environ.setdefault("C2LAB_BUDGET", str(2**22))

from c2lab.config import Settings  # noqa: E402
from c2lab.families import decomplete, gen_toroidal_grid  # noqa: E402
from c2lab.graph.core import LabeledGraph  # noqa: E402
from c2lab.logging_setup import setup_structured_logging  # noqa: E402

FAMILY_DATA = Path(__file__).parent / "data" / "families"

# reset_logging is function scoped and autouse, so every @given test requests it
hypothesis_settings.register_profile("c2lab", suppress_health_check=[HealthCheck.function_scoped_fixture])
hypothesis_settings.load_profile("c2lab")


@pytest.fixture(autouse=True)
def reset_logging():
    """Start every test from the environment's logging configuration."""
    structlog.reset_defaults()
    setup_structured_logging(Settings())
    yield
    structlog.contextvars.clear_contextvars()


@pytest.fixture
def triangle():
    """K3 with edges 01, 12, 20."""
    return LabeledGraph(3, ((0, 1), (1, 2), (2, 0)))


@pytest.fixture
def k4():
    """Complete graph on four vertices; the decompleted K5 (3-spoke wheel)."""
    return LabeledGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


@pytest.fixture
def path3():
    """Path on three vertices; too few edges for the c2 formulas."""
    return LabeledGraph(3, ((0, 1), (1, 2)))


@pytest.fixture
def grid_333():
    """Decompleted 3x3 toroidal grid: 8 vertices, 14 edges."""
    return decomplete(gen_toroidal_grid(3, 0, 3))


@pytest.fixture
def settings():
    """Fresh settings read from the test environment."""
    return Settings()


@pytest.fixture
def family_data():
    """Directory of the negative family specs."""
    return FAMILY_DATA


@pytest.fixture
def write_graph(tmp_path):
    """Write a graph to a temporary file and return the path."""

    def _write(g: LabeledGraph, name: str = "graph.txt") -> Path:
        path = tmp_path / name
        path.write_text(g.to_text(), encoding="ascii")
        return path

    return _write
