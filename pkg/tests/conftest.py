import numpy as np
import pytest

from aquadenoise.data import test_image


@pytest.fixture(scope="session")
def scene():
    return test_image()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
