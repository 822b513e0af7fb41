from collections import Counter
from pathlib import Path

import pytest

from pathquery import FileModuleLoader, load_graph

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def g1():
    return load_graph((FIXTURES / "g1.pqt").read_text())


@pytest.fixture(scope="session")
def g2():
    return load_graph((FIXTURES / "g2.pqt").read_text())


@pytest.fixture(scope="session")
def g1_extended():
    return load_graph((FIXTURES / "g1_extended.pqt").read_text())


@pytest.fixture(scope="session")
def fixture_loader():
    return FileModuleLoader([FIXTURES])


def bag(values) -> Counter:
    """Multiset view of values or (root, value) pairs."""
    return Counter(values)
