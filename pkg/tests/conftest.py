import pytest

from hecke_lab.newspace import characterize
from hecke_lab.spaces import load_families

GRID = [(p, n) for p in (2, 3, 5) for n in (1, 2, 3)]


@pytest.fixture(scope="session")
def families():
    return load_families()


@pytest.fixture(scope="session")
def char_results(families):
    """Newspace characterization of every fixture family, computed once."""
    return {fam["name"]: characterize(fam["space"]) for fam in families}
