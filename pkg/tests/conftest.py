import numpy as np
import pytest

from dicnet.data import MaskSpec, corrupt, generate_synthetic
from dicnet.model import ModelConfig, init_model


def pytest_addoption (parser):
    parser.addoption('--runslow', action = 'store_true', default = False,
                     help = 'run slow end-to-end tests')


def pytest_configure (config):
    config.addinivalue_line('markers', 'slow: long-running end-to-end check')


def pytest_collection_modifyitems (config, items):
    if config.getoption('--runslow'):
        return
    skip = pytest.mark.skip(reason = 'needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng ():
    return np.random.default_rng(1234)


@pytest.fixture
def clean ():
    """A small complete dataset."""
    return generate_synthetic(40, 3, 4, [6, 5, 4], 3, .1, 7)


@pytest.fixture
def corrupted (clean):
    """The small dataset with half its views and labels missing."""
    return corrupt(clean, MaskSpec(.3, .5, .75, 3))


@pytest.fixture
def small_model (clean):
    return init_model(ModelConfig(clean.dims, clean.c, [8], 4, seed = 5))
