import numpy as np
import pytest

from qsdelim import builtin_fixture


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def dk_fixture():
    return builtin_fixture("duan-kimble")


@pytest.fixture(scope="session")
def cavity_fixture_default():
    return builtin_fixture("cavity")


@pytest.fixture(scope="session")
def mirror_fixture_default():
    return builtin_fixture("mirror")
