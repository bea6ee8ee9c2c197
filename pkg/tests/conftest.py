import numpy as np
import pytest

from subcircuit.encodings import FermiHubbardSpec, encode


@pytest.fixture(scope="session")
def spec2():
    return FermiHubbardSpec(side=2, fermion_count=2)


@pytest.fixture(scope="session")
def compact2(spec2):
    return encode(spec2, "compact")


@pytest.fixture(scope="session")
def vc2(spec2):
    return encode(spec2, "vc")


@pytest.fixture(scope="session")
def spec5():
    return FermiHubbardSpec(side=5, fermion_count=5)


@pytest.fixture(scope="session")
def compact5(spec5):
    return encode(spec5, "compact")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
