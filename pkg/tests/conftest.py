from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from cw11.jet import Jet

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def quad1d():
    # samples of t^2/2 at 0 and 1
    return Jet.from_entries([([0.0], 0.0, [0.0]), ([1.0], 0.5, [1.0])])


@pytest.fixture
def affine1d():
    return Jet.from_entries([([0.0], 3.0, [2.0]), ([1.0], 5.0, [2.0])])


@pytest.fixture
def bad1d():
    return Jet.from_entries([([0.0], 0.0, [0.0]), ([1.0], -1.0, [0.0])])


@pytest.fixture
def singleton1d():
    # at x=1 with M=1 the pair (b=0, a=2) ball collapses to the point 1
    return Jet.from_entries([([0.0], 0.0, [0.0]), ([2.0], 1.5, [1.0])])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
