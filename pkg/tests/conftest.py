import numpy as np
import pytest
from hypothesis import settings

from fiberinfo.grid import GridSpec
from fiberinfo.propagation import ChannelParams, gaussian_pulse

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def grid():
    return GridSpec(1.0, 1024, 64)


@pytest.fixture
def small_grid():
    return GridSpec(1.0, 256, 16)


@pytest.fixture
def params(grid):
    return ChannelParams(5e-7, 1.0, 1.0, 1e-6, grid.W_prime, grid.W_d)


@pytest.fixture
def pulse(grid):
    return gaussian_pulse(grid, 1.0, 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
