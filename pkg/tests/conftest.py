# tests/conftest.py
# Puts the project root on the import path and shares the worked example.

import sys
from pathlib import Path

import pytest

# Add the project root to the Python path
project_root = str(Path(__file__).parent.parent)
sys.path.insert(0, project_root)

from core.topple_matrix import RateVector, ToppleMatrix  # noqa: E402

EXAMPLE_ROWS = [[2, -1], [-3, 4]]
K3_ROWS = [[2, -1], [-1, 2]]


@pytest.fixture
def example_matrix():
    """Δ = [[2, -1], [-3, 4]], det 5."""
    return ToppleMatrix.from_rows(EXAMPLE_ROWS)


@pytest.fixture
def example_rate(example_matrix):
    return RateVector.of(example_matrix, (2, 1))


@pytest.fixture
def k3_matrix():
    """Reduced Laplacian of the triangle, det 3."""
    return ToppleMatrix.from_rows(K3_ROWS)
