from pathlib import Path

import pytest

from optlab import get_backend

THEORIES = ("quantum", "quantum-real", "classical")

SYSTEMS = {"A": 2, "B": 3}


@pytest.fixture(params=THEORIES)
def backend(request):
    """One backend per theory, with a qubit-sized and a trit-sized system."""
    return get_backend(request.param, SYSTEMS)


@pytest.fixture
def quantum():
    return get_backend("quantum", SYSTEMS)


@pytest.fixture
def real_quantum():
    return get_backend("quantum-real", SYSTEMS)


@pytest.fixture
def classical():
    return get_backend("classical", SYSTEMS)


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return Path(__file__).parent / "fixtures"
