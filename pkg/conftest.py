"""Pytest config: add project root to path, shared fixtures."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))


@pytest.fixture
def rng():
    """Seeded generator so randomized property checks are reproducible"""
    return np.random.default_rng(20240601)
