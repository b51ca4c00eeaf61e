"""
Global pytest fixtures and configuration for padic-polygon tests.
"""

import json
import tempfile
from pathlib import Path
from typing import Any, Dict, Generator

import pytest

from padic_polygon.arith.ratfun import FactoredRatFun
from padic_polygon.geometry.line import AffinoidDomain
from padic_polygon.polygons.spectral import DifferentialOperator


# ============================================================================
# Pytest Configuration
# ============================================================================


def pytest_configure(config):
    """Configure pytest with custom settings."""
    config.addinivalue_line("markers", "unit: Unit tests (fast, isolated)")
    config.addinivalue_line("markers", "integration: Integration tests (slower)")
    config.addinivalue_line("markers", "slow: Slow tests")


# ============================================================================
# Path Fixtures
# ============================================================================


@pytest.fixture(scope="session")
def project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def fixtures_dir(project_root: Path) -> Path:
    """Get the test fixtures directory."""
    return project_root / "tests" / "fixtures"


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """
    Create a temporary directory for tests.

    Yields the directory path and cleans up after the test.
    """
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


# ============================================================================
# Sample Data Fixtures
# ============================================================================


@pytest.fixture
def unit_disk() -> AffinoidDomain:
    """The closed unit disk D^+(0, 1)."""
    return AffinoidDomain.disk(0, 0)


@pytest.fixture
def annulus() -> AffinoidDomain:
    """D^+(0, 1) minus D^-(0, |3|), a closed annulus for p = 3."""
    return AffinoidDomain.build(("0", "0"), [("0", "-1")])


@pytest.fixture
def constant_operator() -> DifferentialOperator:
    """d - 1/3: one spectral radius, certified by Young at every point for p = 3."""
    return DifferentialOperator.build([FactoredRatFun.const("-1/3")])


@pytest.fixture
def fuchsian_operator() -> DifferentialOperator:
    """d - (1/2)/T for p = 2: spectral on the whole branch towards 0."""
    return DifferentialOperator.build([FactoredRatFun.build("-1/2", [(0, -1)])])


@pytest.fixture
def solvable_operator() -> DifferentialOperator:
    """d - 1/T, with the polynomial solution T."""
    return DifferentialOperator.build([FactoredRatFun.build(-1, [(0, -1)])])


@pytest.fixture
def operator_payload() -> Dict[str, Any]:
    """JSON form of d - 1/3 with p = 3."""
    return {
        "p": 3,
        "rank": 1,
        "coeffs": [{"constant": "-1/3", "factors": []}],
    }


@pytest.fixture
def write_json(temp_dir: Path):
    """Write a payload to a JSON file in the temp directory and return its path."""

    def _write(name: str, payload: Any) -> Path:
        path = temp_dir / name
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
        return path

    return _write
