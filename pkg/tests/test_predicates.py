import random
from fractions import Fraction

import pytest

from contourforge.predicates import (orient2d, incircle, segments_cross,
                                     segments_intersect)


def _orient_exact(a, b, c):
    a, b, c = [(Fraction(p[0]), Fraction(p[1])) for p in (a, b, c)]
    det = ((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))
    return (det > 0) - (det < 0)


def _incircle_exact(a, b, c, d):
    rows = []
    for p in (a, b, c):
        dx = Fraction(p[0]) - Fraction(d[0])
        dy = Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (ax, ay, al), (bx, by, bl), (cx, cy, cl) = rows
    det = (al * (bx * cy - cx * by) + bl * (cx * ay - ax * cy) +
           cl * (ax * by - bx * ay))
    return (det > 0) - (det < 0)


orient_data = [
    ((0, 0), (1, 0), (0, 1), 1),
    ((0, 0), (0, 1), (1, 0), -1),
    ((0, 0), (1, 1), (2, 2), 0),
    ((0.5, 0.5), (12.0, 12.0), (24.0, 24.0), 0),
    ((0.1, 0.1), (0.2, 0.2), (0.3, 0.3), _orient_exact((0.1, 0.1),
                                                         (0.2, 0.2),
                                                         (0.3, 0.3))),
]


@pytest.mark.parametrize("a, b, c, expected", orient_data)
def test_orient2d(a, b, c, expected):
    assert orient2d(a, b, c) == expected


def test_orient2d_near_degenerate_matches_exact():
    rng = random.Random(7)
    for _ in range(2000):
        x = 0.5 + rng.randint(0, 255) * 2.0 ** -53
        y = 0.5 + rng.randint(0, 255) * 2.0 ** -53
        a, b, c = (x, y), (12.0, 12.0), (24.0, 24.0)
        assert orient2d(a, b, c) == _orient_exact(a, b, c)


incircle_data = [
    ((0, 0), (1, 0), (0, 1), (0.5, 0.5), 1),
    ((0, 0), (1, 0), (0, 1), (2, 2), -1),
    ((0, 0), (1, 0), (1, 1), (0, 1), 0),
    ((-1, 0), (0, -1), (1, 0), (0, 1), 0),
]


@pytest.mark.parametrize("a, b, c, d, expected", incircle_data)
def test_incircle(a, b, c, d, expected):
    assert incircle(a, b, c, d) == expected


def test_incircle_random_matches_exact():
    rng = random.Random(11)
    for _ in range(500):
        pts = [(rng.randint(0, 8) * 0.5, rng.randint(0, 8) * 0.5)
               for _ in range(4)]
        a, b, c, d = pts
        if _orient_exact(a, b, c) <= 0:
            continue
        assert incircle(a, b, c, d) == _incircle_exact(a, b, c, d)


crossing_data = [
    ((0, 0), (2, 2), (0, 2), (2, 0), True, True),
    ((0, 0), (2, 0), (1, 0), (1, 1), False, True),
    ((0, 0), (1, 0), (1, 0), (2, 0), False, True),
    ((0, 0), (2, 0), (1, 0), (3, 0), False, True),
    ((0, 0), (1, 0), (2, 0), (3, 0), False, False),
    ((0, 0), (1, 1), (2, 0), (3, 1), False, False),
]


@pytest.mark.parametrize("a, b, c, d, cross, meet", crossing_data)
def test_segment_tests(a, b, c, d, cross, meet):
    assert segments_cross(a, b, c, d) is cross
    assert segments_intersect(a, b, c, d) is meet
