from fractions import Fraction

import pytest

from uqboson.qscalar import make_backend

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def laurent():
    return make_backend("exact-laurent")


@pytest.fixture
def radical():
    return make_backend("exact-radical")


@pytest.fixture
def numeric():
    return make_backend("numeric", q=Fraction(7, 10))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
