"""Shared pytest setup: put the project root on sys.path and provide seeded generators."""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
