import pytest

from oor.reproduce import load_bundled
from oor.topology import build_ensemble


@pytest.fixture(scope="session")
def topo24():
    return load_bundled()


@pytest.fixture(scope="session")
def ens24(topo24):
    return build_ensemble(topo24)
