import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from pappus.boxes import MarkedBox
from pappus.kernel import HomPoint

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


def unit_open(max_denominator=50):
    """Rationals in the open interval (-1, 1)."""
    return st.fractions(min_value=Fraction(-49, 50), max_value=Fraction(49, 50),
                        max_denominator=max_denominator)


def nonzero_fractions(bound=10, max_denominator=20):
    return st.fractions(min_value=-bound, max_value=bound,
                        max_denominator=max_denominator).filter(lambda x: x != 0)


def random_box(rng: random.Random) -> MarkedBox:
    """A convex marked box near the square with corners (+-1, +-1)."""

    def jitter():
        return Fraction(rng.randint(-20, 20), 100)

    p = (Fraction(-1) + jitter(), Fraction(1) + jitter())
    q = (Fraction(1) + jitter(), Fraction(1) + jitter())
    r = (Fraction(1) + jitter(), Fraction(-1) + jitter())
    s = (Fraction(-1) + jitter(), Fraction(-1) + jitter())
    u = Fraction(rng.randint(1, 99), 100)
    v = Fraction(rng.randint(1, 99), 100)
    t = (p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]))
    b = (r[0] + v * (s[0] - r[0]), r[1] + v * (s[1] - r[1]))
    return MarkedBox(*[HomPoint(x, y, 1) for x, y in (p, q, r, s, t, b)])


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def boxes(rng):
    return [random_box(rng) for _ in range(100)]
