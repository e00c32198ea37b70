import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from lipmult.poly import parse

settings.register_profile(
    "lipmult", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "lipmult"))

XY = ["x", "y"]
XYZ = ["x", "y", "z"]


def P(text, variables=None):
    """Parse over (x, y) unless told otherwise."""
    return parse(text, variables or XY)


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


sys.path.insert(0, os.path.dirname(__file__))
