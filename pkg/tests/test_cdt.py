import math
import random
from fractions import Fraction

import pytest

from contourforge.cdt import (triangulate, triangulate_contours,
                              classify_interior, interior_flags)
from contourforge.models import Contour
from contourforge.predicates import orient2d
from contourforge.utils import (DuplicatePointException,
                                CrossingConstraintsException)


def _incircle_exact(a, b, c, d):
    rows = []
    for p in (a, b, c):
        dx = Fraction(p[0]) - Fraction(d[0])
        dy = Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (ax, ay, al), (bx, by, bl), (cx, cy, cl) = rows
    return (al * (bx * cy - cx * by) + bl * (cx * ay - ax * cy) +
            cl * (ax * by - bx * ay))


def _random_points(rng, count, spread=20):
    points = set()
    while len(points) < count:
        points.add((rng.randint(0, spread) * 0.5,
                    rng.randint(0, spread) * 0.5))
    return sorted(points)


def _illegal_edges(tri):
    bad = []
    for t, (a, b, c) in enumerate(tri.triangles):
        for k in range(3):
            n = tri.neighbors[t][k]
            u, v = tri.triangles[t][k], tri.triangles[t][(k + 1) % 3]
            if n is None or tri.is_constrained(u, v):
                continue
            far = [w for w in tri.triangles[n] if w not in (u, v)][0]
            pa, pb, pc = tri.triangle_points(t)
            if _incircle_exact(pa, pb, pc, tri.points[far]) > 0:
                bad.append((u, v))
    return bad


def _check_mesh(tri):
    for a, b, c in tri.triangles:
        assert orient2d(tri.points[a], tri.points[b], tri.points[c]) > 0
        assert a == min(a, b, c)
    assert list(tri.triangles) == sorted(tri.triangles)


@pytest.mark.parametrize("seed", range(10))
def test_euler_relation(seed):
    rng = random.Random(seed)
    for _ in range(20):
        points = _random_points(rng, rng.randint(3, 60))
        tri = triangulate(points)
        if len(tri) == 0:
            continue
        _check_mesh(tri)
        vertices = set(v for t in tri.triangles for v in t)
        assert len(vertices) == len(points)
        assert len(tri) == 2 * (len(points) - 1) - tri.hull_size


@pytest.mark.parametrize("seed", range(5))
def test_delaunay_property(seed):
    rng = random.Random(100 + seed)
    for _ in range(20):
        tri = triangulate(_random_points(rng, rng.randint(3, 40)))
        assert _illegal_edges(tri) == []


def test_collinear_points_have_no_triangles():
    tri = triangulate([(0, 0), (1, 1), (2, 2)])
    assert len(tri) == 0


def test_collinear_hull_points_are_kept():
    points = [(0, 0), (1, 0), (2, 0), (3, 0), (1.5, 1)]
    tri = triangulate(points)
    assert len(tri) == 3
    assert tri.hull_size == 5


def test_square_is_deterministic():
    points = [(0, 0), (1, 0), (1, 1), (0, 1)]
    first = triangulate(points)
    again = triangulate(points)
    assert first.triangles == again.triangles
    assert len(first) == 2
    assert first.edges() == again.edges()


def test_duplicate_points():
    with pytest.raises(DuplicatePointException):
        triangulate([(0, 0), (1, 0), (0, 0), (0, 1)])


def test_missing_constraint_point():
    with pytest.raises(ValueError):
        triangulate([(0, 0), (1, 0), (0, 1)], [(0, 5)])


def test_crossing_constraints():
    points = [(0, 0), (2, 0), (2, 2), (0, 2)]
    with pytest.raises(CrossingConstraintsException):
        triangulate(points, [(0, 2), (1, 3)])


def _star(spikes, inner=1.0, outer=4.0):
    points = []
    for k in range(2 * spikes):
        radius = outer if k % 2 == 0 else inner
        angle = math.pi * k / spikes
        points.append((round(radius * math.cos(angle), 6),
                       round(radius * math.sin(angle), 6)))
    return points


@pytest.mark.parametrize("spikes", [3, 5, 7])
def test_star_constraints_are_edges(spikes):
    points = _star(spikes)
    n = len(points)
    constraints = [(k, (k + 1) % n) for k in range(n)]
    tri = triangulate(points, constraints)
    edges = set(tri.edges())
    for u, v in constraints:
        assert (min(u, v), max(u, v)) in edges
        assert tri.is_constrained(u, v)
    assert _illegal_edges(tri) == []
    _check_mesh(tri)


def test_constraint_through_vertex_is_split():
    points = [(0, 0), (1, 0), (2, 0), (1, 1), (1, -1)]
    tri = triangulate(points, [(0, 2)])
    assert tri.is_constrained(0, 1)
    assert tri.is_constrained(1, 2)
    assert not tri.is_constrained(0, 2)


def test_contour_interior_of_square_with_hole():
    outer = Contour([(0, 0), (6, 0), (6, 6), (0, 6)])
    hole = Contour([(2, 2), (2, 4), (4, 4), (4, 2)])
    tri = triangulate_contours([outer, hole])
    inside = tri.interior_indices()
    area = sum(abs((b[0] - a[0]) * (c[1] - a[1]) -
                   (b[1] - a[1]) * (c[0] - a[0])) / 2.0
               for a, b, c in (tri.triangle_points(t) for t in inside))
    assert area == pytest.approx(32.0)
    assert len(tri) == 10
    assert len(inside) == 8
    assert classify_interior(tri, [outer, hole]) == tri.interior


def test_concave_contour_interior():
    contour = Contour([(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)])
    tri = triangulate_contours([contour])
    assert len(tri) == 4
    assert len(tri.interior_indices()) == 3


def test_shared_points_are_merged():
    left = Contour([(0, 0), (1, 0), (1, 1), (0, 1)])
    right = Contour([(1, 0), (2, 0), (2, 1), (1, 1)])
    tri = triangulate_contours([left, right])
    assert len(tri.points) == 6
    assert all(tri.interior)


def test_interior_flags_ignore_cancelled_edges():
    tri = triangulate([(0, 0), (1, 0), (0, 1)])
    assert interior_flags(tri, [(0, 1), (1, 2), (2, 0)]) == (True,)
    assert interior_flags(tri, []) == (False,)
    assert interior_flags(tri, [(0, 1), (1, 0)]) == (False,)


def test_with_interior_shares_mesh():
    tri = triangulate([(0, 0), (1, 0), (1, 1), (0, 1)])
    flagged = tri.with_interior([True, False], virtual=[(2, 0)])
    assert flagged.triangles is tri.triangles
    assert flagged.interior_indices() == [0]
    assert flagged.is_virtual(0, 2)
    assert not tri.is_virtual(0, 2)
    with pytest.raises(ValueError):
        tri.with_interior([True])
