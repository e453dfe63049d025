import pytest

from kmcrystal.b_infinity import enumerate_graph
from kmcrystal.root_datum import affinize, build_finite


@pytest.fixture(scope="session")
def a2():
    return build_finite("A", 2)


@pytest.fixture(scope="session")
def a1_aff():
    return affinize(build_finite("A", 1))


@pytest.fixture(scope="session")
def a2_graph6(a2):
    return enumerate_graph(a2, 6)


@pytest.fixture(scope="session")
def a1_aff_graph4(a1_aff):
    return enumerate_graph(a1_aff, 4)
