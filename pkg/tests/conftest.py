from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from hotelling import make_profile

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

COUNTEREXAMPLE = ["1/10", "1/10", "3/10", "3/10", "7/10", "7/10", "9/10", "9/10"]

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def counterexample():
    return make_profile(COUNTEREXAMPLE)


def positions(max_denominator=24, min_size=2, max_size=8):
    return st.lists(
        st.fractions(0, 1, max_denominator=max_denominator),
        min_size=min_size, max_size=max_size,
    )


def profiles(**kw):
    return positions(**kw).map(make_profile)


def F(text):
    return Fraction(text)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
