import pytest

from hamflow.corpus import BUILTIN_DELTAS, BasisSpec


@pytest.fixture
def b1d3():
    return BasisSpec(1, False, BUILTIN_DELTAS["d3"])


@pytest.fixture
def b2d3():
    return BasisSpec(2, False, BUILTIN_DELTAS["d3"])


@pytest.fixture
def b2d5():
    return BasisSpec(2, False, BUILTIN_DELTAS["d5"])
