import math

import numpy as np
import pytest

from ccn_lab.coeffs import ccn_bundle
from ccn_lab.msys import build_rgl_system

SQRT23_3 = math.sqrt(23) / 3


@pytest.fixture(scope="session")
def rgl():
    return build_rgl_system()


@pytest.fixture(scope="session")
def bundle_08_plus():
    return ccn_bundle((0.8, 0.0), "plus")


@pytest.fixture(scope="session")
def bundle_08_minus():
    return ccn_bundle((0.8, 0.0), "minus")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# independent closed forms used as oracles throughout the tests
def B_oracle(k, l):
    return k * (1 - k * k - l * l)


def A_oracle(k, l):
    return l * (1 - k * k - l * l)


def dzz_oracle(k, l):
    return (1 - 3 * k * k - 3 * l * l) * (1 - k * k - l * l)
