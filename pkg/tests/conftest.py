import random
import sys

import pytest

from malcev.coeffield import Field, TwistSpec
from malcev.mnseries import SeriesRing


@pytest.fixture
def ring():
    return SeriesRing()


@pytest.fixture
def twisted_ring():
    return SeriesRing(Field(2), TwistSpec.from_names(["conj", "id"]))


@pytest.fixture
def rng():
    return random.Random(12345)



def pytest_terminal_summary(terminalreporter):
    mod = next((m for n, m in sys.modules.items() if n.endswith("test_acceptance")), None)
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
