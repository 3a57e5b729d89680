import math

import pytest
from hypothesis import HealthCheck, settings

from pathghz.params import FanoutParams, SourceParams
from pathghz.spectral import KGrid, SingleBin, discretize

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def single_bwf():
    return discretize(SingleBin(), KGrid())


@pytest.fixture
def balanced():
    return SourceParams()


@pytest.fixture
def ideal_fanout():
    return FanoutParams()


SQRT2 = math.sqrt(2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
