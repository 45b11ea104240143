"""
Constrained Delaunay triangulation without Steiner points.

The triangulation is built by a lexicographic sweep that keeps collinear
hull points, legalized with Lawson flips and then forced to contain every
constraint segment by flipping away the edges the segment crosses. All
geometric decisions go through the exact predicates.
"""
import logging
from collections import deque, Counter

from .models import GeomPoint
from .predicates import orient2d, incircle, segments_cross
from .utils import CrossingConstraintsException, DuplicatePointException

logger = logging.getLogger(__name__)


def _key(u, v):
    return (u, v) if u < v else (v, u)


class Triangulation(object):
    """
    Immutable triangle mesh over a point list.

    `triangles` holds counterclockwise index triples, each rotated to start
    at its smallest index, in sorted order. `constrained` and `virtual` are
    sets of undirected edges given as sorted index pairs. `interior` flags
    the triangles that belong to a shape.
    """

    def __init__(self, points, triangles, constrained=(), interior=None,
                 virtual=()):
        self.points = tuple(GeomPoint(float(p[0]), float(p[1]))
                            for p in points)
        self.triangles = tuple(tuple(t) for t in triangles)
        self.constrained = frozenset(_key(*e) for e in constrained)
        self.virtual = frozenset(_key(*e) for e in virtual)
        if interior is None:
            interior = (False,) * len(self.triangles)
        if len(interior) != len(self.triangles):
            raise ValueError("Need one interior flag per triangle")
        self.interior = tuple(bool(f) for f in interior)
        self._edge_map = None
        self._neighbors = None

    def __len__(self):
        return len(self.triangles)

    def __repr__(self):
        return "Triangulation({0} points, {1} triangles)".format(
            len(self.points), len(self.triangles))

    @property
    def edge_map(self):
        """Directed edge (u, v) -> index of the triangle on its left"""
        if self._edge_map is None:
            self._edge_map = {}
            for t, (a, b, c) in enumerate(self.triangles):
                self._edge_map[(a, b)] = t
                self._edge_map[(b, c)] = t
                self._edge_map[(c, a)] = t
        return self._edge_map

    @property
    def neighbors(self):
        """
        Per triangle, the triangle across each of its edges (None on the
        hull). Edge k of triangle (a, b, c) runs from vertex k to k + 1.
        """
        if self._neighbors is None:
            edge_map = self.edge_map
            self._neighbors = tuple(
                tuple(edge_map.get((tri[(k + 1) % 3], tri[k]))
                      for k in range(3))
                for tri in self.triangles)
        return self._neighbors

    def edges(self):
        return sorted(set(_key(u, v) for u, v in self.edge_map))

    @property
    def hull_size(self):
        edge_map = self.edge_map
        return sum(1 for u, v in edge_map if (v, u) not in edge_map)

    def is_constrained(self, u, v):
        return _key(u, v) in self.constrained

    def is_virtual(self, u, v):
        return _key(u, v) in self.virtual

    def triangle_points(self, t):
        return tuple(self.points[i] for i in self.triangles[t])

    def interior_indices(self):
        return [t for t, flag in enumerate(self.interior) if flag]

    def with_interior(self, interior, virtual=None):
        """Copy sharing the mesh, with new interior flags and virtual edges"""
        if len(interior) != len(self.triangles):
            raise ValueError("Need one interior flag per triangle")
        result = object.__new__(Triangulation)
        result.points = self.points
        result.triangles = self.triangles
        result.constrained = self.constrained
        result.virtual = (self.virtual if virtual is None
                          else frozenset(_key(*e) for e in virtual))
        result.interior = tuple(bool(f) for f in interior)
        result._edge_map = self.edge_map
        result._neighbors = self.neighbors
        return result


class _Mesh(object):
    """Mutable mesh: opp[(u, v)] = w for every counterclockwise (u, v, w)"""

    def __init__(self, points):
        self.points = points
        self.opp = {}
        self.vedge = {}
        self.fixed = set()

    def add(self, u, v, w):
        self.opp[(u, v)] = w
        self.opp[(v, w)] = u
        self.opp[(w, u)] = v
        self.vedge[u] = v
        self.vedge[v] = w
        self.vedge[w] = u

    def remove(self, u, v, w):
        del self.opp[(u, v)]
        del self.opp[(v, w)]
        del self.opp[(w, u)]

    def has_edge(self, u, v):
        return (u, v) in self.opp or (v, u) in self.opp

    def orient(self, a, b, c):
        return orient2d(self.points[a], self.points[b], self.points[c])

    def flip(self, u, v):
        """Replace the diagonal (u, v) by the one joining its apices"""
        c = self.opp[(u, v)]
        d = self.opp[(v, u)]
        self.remove(u, v, c)
        self.remove(v, u, d)
        self.add(u, d, c)
        self.add(d, v, c)
        return c, d

    def must_flip(self, u, v):
        if _key(u, v) in self.fixed:
            return False
        c = self.opp.get((u, v))
        d = self.opp.get((v, u))
        if c is None or d is None:
            return False
        pts = self.points
        side = incircle(pts[u], pts[v], pts[c], pts[d])
        if side > 0:
            return True
        # cocircular: keep the diagonal with the lexicographically
        # smaller index pair
        return side == 0 and _key(c, d) < _key(u, v)

    def legalize(self, edges):
        stack = list(edges)
        while stack:
            u, v = stack.pop()
            if not self.must_flip(u, v):
                continue
            c, d = self.flip(u, v)
            stack.extend([(u, d), (d, v), (v, c), (c, u)])

    def star(self, a):
        """Triangles (a, x, y) around vertex a in counterclockwise order"""
        x = self.vedge.get(a)
        if x is None or (a, x) not in self.opp:
            x = next((v for (u, v) in self.opp if u == a), None)
            if x is None:
                return []
        # rewind clockwise to a hull edge, or until the fan closes
        start = x
        while True:
            prev = self.opp.get((x, a))
            if prev is None or prev == start:
                break
            x = prev
        fan = []
        first = x
        while True:
            y = self.opp.get((a, x))
            if y is None:
                break
            fan.append((x, y))
            x = y
            if x == first:
                break
        return fan


def _sweep(mesh, order):
    """Lexicographic sweep insertion; collinear hull points are kept"""
    pts = mesh.points
    if len(order) < 3:
        return
    k = 2
    while k < len(order) and orient2d(pts[order[0]], pts[order[1]],
                                      pts[order[k]]) == 0:
        k += 1
    if k == len(order):
        return
    chain = order[:k]
    apex = order[k]
    nxt, prv = {}, {}
    if orient2d(pts[chain[0]], pts[chain[1]], pts[apex]) > 0:
        for a, b in zip(chain, chain[1:]):
            mesh.add(a, b, apex)
        hull = list(chain) + [apex]
    else:
        for a, b in zip(chain, chain[1:]):
            mesh.add(b, a, apex)
        hull = [chain[0], apex] + list(reversed(chain[1:]))
    for a, b in zip(hull, hull[1:] + hull[:1]):
        nxt[a] = b
        prv[b] = a

    last = apex
    for q in order[k + 1:]:
        pq = pts[q]
        a = last
        while orient2d(pts[prv[a]], pts[a], pq) < 0:
            a = prv[a]
        b = last
        while orient2d(pts[b], pts[nxt[b]], pq) < 0:
            b = nxt[b]
        new_edges = []
        u = a
        while u != b:
            v = nxt[u]
            mesh.add(v, u, q)
            new_edges.append((u, v))
            u = v
        nxt[a] = q
        prv[q] = a
        nxt[q] = b
        prv[b] = q
        mesh.legalize(new_edges)
        last = q


def _between(pts, a, b, x):
    """True if x lies strictly inside the segment ab, given collinearity"""
    (ax, ay), (bx, by), (px, py) = pts[a], pts[b], pts[x]
    from_a = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
    from_b = (px - bx) * (ax - bx) + (py - by) * (ay - by)
    return from_a > 0 and from_b > 0


def _crossed_edges(mesh, a, b):
    """
    Edges crossed by the segment ab, or a collinear vertex that splits it
    :return: (list of (l, r) edges, split vertex or None)
    """
    pts = mesh.points
    for x, y in mesh.star(a):
        for v in (x, y):
            if mesh.orient(a, b, v) == 0 and _between(pts, a, b, v):
                return [], v
    wedge = None
    for x, y in mesh.star(a):
        if mesh.orient(a, x, b) > 0 and mesh.orient(a, y, b) < 0:
            wedge = (x, y)
            break
    if wedge is None:
        raise CrossingConstraintsException(
            "Segment {0}-{1} leaves the triangulated area".format(a, b))
    r, l = wedge
    crossed = []
    while True:
        if _key(l, r) in mesh.fixed:
            raise CrossingConstraintsException(
                "Constraint {0}-{1} crosses constraint {2}-{3}".format(
                    a, b, *_key(l, r)))
        crossed.append((l, r))
        w = mesh.opp[(l, r)]
        if w == b:
            return crossed, None
        side = mesh.orient(a, b, w)
        if side == 0:
            return [], w
        if side > 0:
            l = w
        else:
            r = w


def _insert_constraint(mesh, a, b):
    """:return: vertex splitting ab, or None once ab is an edge"""
    if mesh.has_edge(a, b):
        mesh.fixed.add(_key(a, b))
        return None
    crossed, split = _crossed_edges(mesh, a, b)
    if split is not None:
        return split
    pts = mesh.points
    cavity = set([a, b])
    for u, v in crossed:
        cavity.update((u, v))
    queue = deque(crossed)
    while queue:
        u, v = queue.popleft()
        c = mesh.opp[(u, v)]
        d = mesh.opp[(v, u)]
        if mesh.orient(c, d, u) * mesh.orient(c, d, v) >= 0:
            queue.append((u, v))
            continue
        mesh.flip(u, v)
        if segments_cross(pts[a], pts[b], pts[c], pts[d]):
            queue.append((c, d))
    mesh.fixed.add(_key(a, b))
    # the retriangulated cavity and its rim
    rim = set()
    for x in cavity:
        for p, q in mesh.star(x):
            for u, v in ((x, p), (p, q), (q, x)):
                if u in cavity and v in cavity:
                    rim.add(_key(u, v))
    mesh.legalize(sorted(rim))
    return None


def triangulate(points, constraint_edges=()):
    """
    Constrained Delaunay triangulation
    :param points: sequence of (x, y), no duplicates
    :param constraint_edges: pairs of point indices
    :return: Triangulation with all interior flags unset
    :raises DuplicatePointException: if two points coincide
    :raises CrossingConstraintsException: if constraints cross
    """
    pts = [GeomPoint(float(p[0]), float(p[1])) for p in points]
    seen = {}
    for i, p in enumerate(pts):
        if p in seen:
            raise DuplicatePointException(
                "Points {0} and {1} coincide at {2}".format(seen[p], i, p))
        seen[p] = i

    mesh = _Mesh(pts)
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1]))
    _sweep(mesh, order)

    pending = deque(sorted(set(_key(u, v) for u, v in constraint_edges
                               if u != v)))
    for u, v in pending:
        if not (0 <= u < len(pts) and 0 <= v < len(pts)):
            raise ValueError("Constraint {0}-{1} names a missing point".format(
                u, v))
    if pending and not mesh.opp:
        raise CrossingConstraintsException(
            "Cannot constrain a triangulation without triangles")
    done = set()
    while pending:
        a, b = pending.popleft()
        if (a, b) in done:
            continue
        split = _insert_constraint(mesh, a, b)
        if split is None:
            done.add((a, b))
        else:
            pending.appendleft(_key(split, b))
            pending.appendleft(_key(a, split))

    triangles = set()
    for (u, v), w in mesh.opp.items():
        tri = (u, v, w)
        k = tri.index(min(tri))
        triangles.add(tri[k:] + tri[:k])
    result = Triangulation(pts, sorted(triangles), mesh.fixed)
    logger.debug("Triangulated %d points, %d constraints into %d triangles",
                 len(pts), len(mesh.fixed), len(result))
    return result


def interior_flags(tri, directed_edges):
    """
    Winding number flood fill: crossing a directed boundary edge from its
    left to its right side lowers the winding by one
    :param directed_edges: iterable of (u, v) index pairs
    :return: tuple of bools, True where the winding number is not zero
    """
    count = Counter(directed_edges)
    winding = [None] * len(tri)
    queue = deque()
    for t, tri_vertices in enumerate(tri.triangles):
        for k in range(3):
            if tri.neighbors[t][k] is None and winding[t] is None:
                u, v = tri_vertices[k], tri_vertices[(k + 1) % 3]
                winding[t] = count[(u, v)] - count[(v, u)]
                queue.append(t)
    while queue:
        t = queue.popleft()
        tri_vertices = tri.triangles[t]
        for k in range(3):
            n = tri.neighbors[t][k]
            if n is None or winding[n] is not None:
                continue
            u, v = tri_vertices[k], tri_vertices[(k + 1) % 3]
            winding[n] = winding[t] + count[(v, u)] - count[(u, v)]
            queue.append(n)
    return tuple(w is not None and w != 0 for w in winding)


def _contour_edges(contours, index):
    edges = []
    for contour in contours:
        ids = [index[(float(p[0]), float(p[1]))] for p in contour]
        for u, v in zip(ids, ids[1:] + ids[:1]):
            if u != v:
                edges.append((u, v))
    return edges


def classify_interior(tri, contours):
    """
    Interior flags for a triangulation whose points include every support
    point of the contours
    :return: tuple of bools
    """
    index = dict(((p.x, p.y), i) for i, p in enumerate(tri.points))
    try:
        edges = _contour_edges(contours, index)
    except KeyError as err:
        raise ValueError("Contour point {0} is not a triangulation "
                         "vertex".format(err.args[0]))
    return interior_flags(tri, edges)


def triangulate_contours(contours, extra_points=()):
    """
    Triangulate the support points of several contours with all their
    edges as constraints and flag the triangles inside them. Points shared
    by several contours become one vertex; zero length edges are dropped.
    :return: Triangulation
    """
    index = {}
    points = []
    for p in [q for contour in contours for q in contour] + list(extra_points):
        key = (float(p[0]), float(p[1]))
        if key not in index:
            index[key] = len(points)
            points.append(key)
    edges = _contour_edges(contours, index)
    tri = triangulate(points, edges)
    flags = interior_flags(tri, edges)
    logger.info("Triangulated %d contours: %d points, %d triangles, "
                "%d interior", len(contours), len(points), len(tri),
                sum(flags))
    return tri.with_interior(flags)
