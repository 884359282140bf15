import pytest

from karica import tiles


@pytest.fixture(scope="session")
def kari():
    return tiles.kari_tileset()
