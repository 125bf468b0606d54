import math

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


def circ_diff(a: float, b: float) -> float:
    """Smallest absolute angular difference in degrees."""
    d = math.fmod(a - b, 360.0)
    if d < 0:
        d += 360.0
    return min(d, 360.0 - d)


@pytest.fixture
def default_config():
    from flowseek.config import ScenarioConfig

    return ScenarioConfig()


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
