import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from pointwave.radial import PhaseState, RadialGrid, gaussian_bump, make_coupling, zero_field

ALPHAS = [0.1, 0.0, -1.0 / (4.0 * math.pi)]


@pytest.fixture
def grid():
    return RadialGrid(40.0, 400)


@pytest.fixture
def bump(grid):
    return gaussian_bump(grid, 12.0, 2.0)


@pytest.fixture
def bump_state(grid, bump):
    return PhaseState(bump, zero_field(grid))


@pytest.fixture
def moving_state(grid):
    """Bump with a smaller bump in the velocity slot."""
    return PhaseState(gaussian_bump(grid, 12.0, 2.0), gaussian_bump(grid, 14.0, 1.5, 0.3))


@pytest.fixture(params=ALPHAS, ids=['positive', 'zero', 'negative'])
def coupling(request):
    return make_coupling(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
