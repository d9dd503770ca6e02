import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bvlab import build_prime_table


@pytest.fixture(scope="session")
def table_1e4():
    return build_prime_table(10**4)


@pytest.fixture(scope="session")
def table_1e5():
    return build_prime_table(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return build_prime_table(10**6)
