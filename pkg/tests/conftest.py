import numpy as np
import pytest

from slowflow import make_grid
from slowflow.fieldgen import gaussian_bump


@pytest.fixture
def grid16():
    return make_grid(16, 4.0)


@pytest.fixture
def grid32():
    return make_grid(32, 8.0)


@pytest.fixture
def gauss32(grid32):
    return gaussian_bump(grid32, width=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
