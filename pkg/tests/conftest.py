import numpy as np
import pytest

from sgsov import solve
from sgsov.acceptance import default_instance


@pytest.fixture(scope="session")
def params7():
    """Default acceptance instance: N=3, p=3, p'=2, couplings from seed 7."""
    return default_instance(seed=7)


@pytest.fixture(scope="session")
def solution7(params7):
    return solve(params7, seed=7)


@pytest.fixture(scope="session")
def params_n1():
    """Smallest odd instance: a single site, dimension 3."""
    return default_instance(seed=11, N=1)


@pytest.fixture(scope="session")
def solution_n1(params_n1):
    return solve(params_n1, seed=11)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
