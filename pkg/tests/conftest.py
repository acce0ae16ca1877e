import os

import numpy as np
import pytest

from sensa.space import ParameterSpace

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def unit2():
    return ParameterSpace.unit(2)


@pytest.fixture
def unit3():
    return ParameterSpace.unit(3)


@pytest.fixture
def unit4():
    return ParameterSpace.unit(4)


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def assert_sums_to_one(v):
    assert abs(float(np.sum(v)) - 1.0) <= 1e-12
