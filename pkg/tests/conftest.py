import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mathieuwkb.angular_basis import build_tables


@pytest.fixture(scope="session")
def table_pi2():
    """Reference table at theta = pi^2 (a/lambda = 2), paper-default sizes."""
    return build_tables(math.pi ** 2, 100, 200)


@pytest.fixture(scope="session")
def table_small():
    """Small-theta table for prefactor and series checks."""
    return build_tables(1e-4, 20, 140)
