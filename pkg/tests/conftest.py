import numpy as np
import pytest

from psqm.grids import SampledLine


@pytest.fixture
def line():
    """Desk-scale position line used across the suite."""
    return SampledLine(8.0, 128)


@pytest.fixture
def coarse_line():
    return SampledLine(8.0, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
