import pytest

from contactsolitons import zoo
from contactsolitons.geometry import riemann

_BUNDLES = {}


def bundle_for(entry):
    """Curvature bundle per entry, computed once per test session."""
    if entry.name not in _BUNDLES:
        _BUNDLES[entry.name] = riemann(entry.metric)
    return _BUNDLES[entry.name]


@pytest.fixture(scope="session")
def paper():
    return zoo.load("paper-kenmotsu")


@pytest.fixture(scope="session")
def paper_bundle(paper):
    return bundle_for(paper)


@pytest.fixture(scope="session")
def flat3():
    return zoo.load("flat-cosymplectic-3")


@pytest.fixture(scope="session")
def alpha_kenmotsu():
    return zoo.load("alpha-kenmotsu-2")


@pytest.fixture(scope="session")
def sasakian():
    return zoo.load("sasakian-r3")
