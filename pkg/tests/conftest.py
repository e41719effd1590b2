import random
from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def halves(lo=-3, hi=3):
    return st.integers(2 * lo, 2 * hi).map(lambda k: Fraction(k, 2))


def point_sets(t, min_size=None, max_size=6):
    return st.lists(st.tuples(*[halves()] * t), min_size=min_size or t + 1, max_size=max_size)


# a seeded generator per example; the package's own samplers take it from there
rngs = st.integers(0, 2 ** 32 - 1).map(random.Random)


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
