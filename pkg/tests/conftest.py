import random
from fractions import Fraction

import pytest
from hypothesis import settings

from cfext.core import from_terms
from cfext.scalar import Scalar

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def bottom_up(b0, terms, N):
    """f_N by composing w -> a/(b + w) from the bottom, as a projective pair (p, q).

    Plain Fractions, no recurrences: an oracle independent of the library.
    """
    p, q = Fraction(0), Fraction(1)
    for a, b in reversed(terms[:N]):
        p, q = a * q, b * q + p
    return b0 * q + p, q


def same_point(x, y):
    """x = (p, q) or None/Fraction; y a Scalar or None (infinity)."""
    p, q = x
    if q == 0:
        return y is None
    return y is not None and y.value == p / q


def random_rational(rng, lo=-5, hi=5, nonzero=True):
    while True:
        v = Fraction(rng.randint(4 * lo, 4 * hi), rng.randint(1, 4))
        if lo <= v <= hi and (v != 0 or not nonzero):
            return v


def random_source(rng, n=15, unit_b=False):
    b0 = random_rational(rng, nonzero=False)
    terms = [
        (random_rational(rng), Fraction(1) if unit_b else random_rational(rng))
        for _ in range(n)
    ]
    src = from_terms(Scalar(b0), [(Scalar(a), Scalar(b)) for a, b in terms])
    return src, b0, terms


@pytest.fixture
def rng():
    return random.Random(20240229)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
