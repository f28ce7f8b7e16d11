import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hdd.geometry import PointSet  # noqa: E402

SQUARE = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
TRIANGLE = [[0.0, 0.0], [4.0, 0.0], [2.0, 1.0]]
TRIANGLE_STRETCHED = [[0.0, 0.0], [4.0, 0.0], [2.0, 5.0]]
# four points in general position (no parallel spans)
GENERAL4 = [[0.0, 0.0], [3.0, 0.2], [1.0, 2.5], [2.2, 1.1]]


@pytest.fixture
def square():
    return PointSet(SQUARE)


@pytest.fixture
def triangle():
    return PointSet(TRIANGLE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_sets(seed, count, d, n_lo, n_hi, scale=1.0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(n_lo, n_hi + 1))
        yield PointSet(rng.uniform(-scale, scale, size=(n, d)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
