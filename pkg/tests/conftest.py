import pytest

from plate_modes.spectrum import PlateGeometry, least_eigenvalues


@pytest.fixture(scope="session")
def geom():
    return PlateGeometry()


@pytest.fixture(scope="session")
def least20(geom):
    return least_eigenvalues(20, geom)
