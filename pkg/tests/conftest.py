import math

import pytest
from hypothesis import settings

from multicopy.qubit_model import StateFamily

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ALPHA = math.pi / 6
NU_GRID = (0.0, 0.02, 0.05, 0.1, 0.2)

_ACCEPTANCE = []


@pytest.fixture
def family():
    return StateFamily(ALPHA, 0.1)


@pytest.fixture
def pure():
    return StateFamily(ALPHA, 0.0)


@pytest.fixture
def report():
    """Record one acceptance line: report(number, passed, detail)."""

    def _record(number, passed, detail):
        _ACCEPTANCE.append((number, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}")
