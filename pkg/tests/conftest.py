import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from liewreath.lie import load_lie  # noqa: E402


@pytest.fixture(scope="session")
def sl2():
    return load_lie("sl2")


@pytest.fixture(scope="session")
def heis():
    return load_lie("heisenberg_3")


@pytest.fixture(scope="session")
def solv():
    return load_lie("solvable_2")
