import pytest

from riesz_bounds import geometry as geo


@pytest.fixture
def unit_square():
    return geo.Box((1.0, 1.0))


@pytest.fixture
def unit_disk():
    return geo.Ball(2, 1.0)


@pytest.fixture
def l_shape():
    return geo.l_shape()
