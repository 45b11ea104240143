"""
Frame, gap closure, torso splitting and the reconnection of oriented
segments into region contours.
"""
import enum
import logging
import math
import warnings
from collections import namedtuple, OrderedDict

from .cdt import triangulate
from .models import GeomPoint, Segment, Contour
from .skeleton import ChainKind
from .utils import NoCandidateEdgeException, OpenChainException

logger = logging.getLogger(__name__)


class GapPolicy(enum.Enum):
    SHORTEST = 'shortest'
    DIRECTION = 'direction'


class PairSource(enum.Enum):
    SKELETON = 'skeleton'
    FRAME = 'frame'
    GAP = 'gap'
    TORSO_SPLIT = 'torso-split'


VectorPair = namedtuple('VectorPair', ['forward', 'backward', 'source'])


def make_pair(p, q, source):
    p = GeomPoint(float(p[0]), float(p[1]))
    q = GeomPoint(float(q[0]), float(q[1]))
    return VectorPair(Segment(p, q), Segment(q, p), source)


class Frame(object):
    """
    Counterclockwise loop of unit spaced points on the image bounding
    rectangle, corners at (-0.5, -0.5) and (width - 0.5, height - 0.5).
    """

    def __init__(self, width, height, extra=()):
        if width < 1 or height < 1:
            raise ValueError("Frame needs a positive size")
        self.width = width
        self.height = height
        left, bottom = -0.5, -0.5
        right, top = width - 0.5, height - 0.5
        base = ([(left + i, bottom) for i in range(width)] +
                [(right, bottom + j) for j in range(height)] +
                [(right - i, top) for i in range(width)] +
                [(left, top - j) for j in range(height)])
        points = dict((self._position(p), GeomPoint(*p)) for p in base)
        for p in extra:
            p = GeomPoint(float(p[0]), float(p[1]))
            if self.on_frame(p):
                points.setdefault(self._position(p), p)
        self.points = [points[s] for s in sorted(points)]

    def __len__(self):
        return len(self.points)

    @property
    def corners(self):
        return [GeomPoint(-0.5, -0.5), GeomPoint(self.width - 0.5, -0.5),
                GeomPoint(self.width - 0.5, self.height - 0.5),
                GeomPoint(-0.5, self.height - 0.5)]

    def on_frame(self, p):
        x, y = p
        right, top = self.width - 0.5, self.height - 0.5
        inside = -0.5 <= x <= right and -0.5 <= y <= top
        return inside and (x in (-0.5, right) or y in (-0.5, top))

    def _position(self, p):
        """Counterclockwise arc length from the lower left corner"""
        x, y = p[0] + 0.5, p[1] + 0.5
        w, h = self.width, self.height
        if y == 0:
            return x
        if x == w:
            return w + y
        if y == h:
            return w + h + (w - x)
        return 2 * w + h + (h - y)

    def including(self, points):
        """Frame with the given points that lie on it inserted in order"""
        return Frame(self.width, self.height,
                     extra=list(self.points) + list(points))

    def vectors(self):
        n = len(self.points)
        return [Segment(self.points[i], self.points[(i + 1) % n])
                for i in range(n)]

    def area(self):
        return float(self.width * self.height)


def add_frame(width, height):
    return Frame(width, height)


def skeleton_pairs(skeleton):
    """One antiparallel pair per skeleton segment of nonzero length"""
    return [make_pair(s.origin, s.endpoint, PairSource.SKELETON)
            for s in skeleton.segments if s.origin != s.endpoint]


def _cosine(direction, p, q):
    dx, dy = q[0] - p[0], q[1] - p[1]
    norm = math.hypot(dx, dy) * math.hypot(*direction)
    if norm == 0.0:
        return -1.0
    return (dx * direction[0] + dy * direction[1]) / norm


def close_gaps(skeleton, frame, policy=GapPolicy.SHORTEST,
               continuation=False, strict=True):
    """
    Bridge every open skeleton end to the frame along an edge of a
    triangulation of the skeleton and frame points. With continuation an
    end may also bridge to another open end.
    :return: list of VectorPair, one per selected edge
    :raises NoCandidateEdgeException: when strict and an end has no edge
    to bridge along
    """
    policy = GapPolicy(policy)
    graph = skeleton.adjacency()
    frame = frame.including(graph.keys())
    terminals = [(p, q) for p, q in skeleton.terminals()
                 if not frame.on_frame(p)]
    if not terminals:
        return []

    index = OrderedDict()
    for p in list(graph) + list(frame.points):
        index.setdefault((p[0], p[1]), len(index))
    points = list(index)
    frame_ids = set(index[(p[0], p[1])] for p in frame.points)
    terminal_ids = set(index[(p[0], p[1])] for p, _ in terminals)
    constraints = [(index[(s.origin[0], s.origin[1])],
                    index[(s.endpoint[0], s.endpoint[1])])
                   for s in skeleton.segments if s.origin != s.endpoint]
    constraints += [(index[(s.origin[0], s.origin[1])],
                     index[(s.endpoint[0], s.endpoint[1])])
                    for s in frame.vectors()]
    tri = triangulate(points, constraints)
    adjacent = dict((i, set()) for i in range(len(points)))
    for u, v in tri.edges():
        if not tri.is_constrained(u, v):
            adjacent[u].add(v)
            adjacent[v].add(u)

    chosen = OrderedDict()
    for terminal, previous in terminals:
        t = index[(terminal[0], terminal[1])]
        targets = frame_ids | (terminal_ids if continuation else set())
        candidates = sorted(q for q in adjacent[t] if q in targets)
        if not candidates:
            message = "Skeleton end {0} sees no frame point".format(
                tuple(terminal))
            if strict:
                raise NoCandidateEdgeException(message)
            warnings.warn(message)
            continue
        length = dict((q, math.hypot(points[q][0] - terminal[0],
                                     points[q][1] - terminal[1]))
                      for q in candidates)
        if policy is GapPolicy.SHORTEST:
            best = min(candidates, key=lambda q: (length[q], q))
        else:
            direction = (terminal[0] - previous[0], terminal[1] - previous[1])
            best = min(candidates, key=lambda q: (
                -_cosine(direction, terminal, points[q]), length[q], q))
        chosen.setdefault((min(t, best), max(t, best)), (t, best))
    pairs = [make_pair(points[t], points[q], PairSource.GAP)
             for t, q in chosen.values()]
    logger.info("Closed %d of %d skeleton ends with %s gaps", len(pairs),
                len(terminals), policy.value)
    return pairs


def _shared_edge(tri, s, t):
    shared = [v for v in tri.triangles[s] if v in tri.triangles[t]]
    return shared[0], shared[1]


def _length(tri, u, v):
    pu, pv = tri.points[u], tri.points[v]
    return math.hypot(pu[0] - pv[0], pu[1] - pv[1])


def _longest_edge(tri, t):
    a = tri.triangles[t]
    return max(_length(tri, a[k], a[(k + 1) % 3]) for k in range(3))


def torso_eligible(tri, chain):
    """
    True if neither junction at the ends of a torso has its longest edge
    on the side that faces its partner
    """
    path = chain.triangles
    first, last = path[0], path[-1]
    if first == last or len(path) < 2:
        return False
    for junction, toward in ((first, path[1]), (last, path[-2])):
        u, v = _shared_edge(tri, junction, toward)
        if _length(tri, u, v) >= _longest_edge(tri, junction):
            return False
    return True


def split_torsos(tri, classes, chains, contours):
    """
    Place one antiparallel pair across the narrowest internal edge of every
    eligible torso. Pairs are only placed between support points of the
    given contours.
    :return: list of VectorPair
    """
    support = set((p.x, p.y) for contour in contours for p in contour)
    pairs = []
    for chain in chains:
        if chain.kind is not ChainKind.TORSO:
            continue
        if any(t not in classes for t in chain.triangles):
            continue
        if not torso_eligible(tri, chain):
            continue
        path = chain.triangles
        widths = [_shared_edge(tri, s, t) for s, t in zip(path, path[1:])]
        u, v = min(widths, key=lambda e: (_length(tri, *e), sorted(e)))
        pu, pv = tri.points[u], tri.points[v]
        if (pu.x, pu.y) not in support or (pv.x, pv.y) not in support:
            continue
        pairs.append(make_pair(pu, pv, PairSource.TORSO_SPLIT))
    logger.info("Placed %d torso split pairs", len(pairs))
    return pairs


def contour_vectors(contours):
    """Oriented segments of contours, zero length segments dropped"""
    vectors = []
    for contour in contours:
        pts = list(contour)
        for p, q in zip(pts, pts[1:] + pts[:1]):
            if p != q:
                vectors.append(Segment(p, q))
    return vectors


def _flatten(items):
    for item in items:
        if isinstance(item, VectorPair):
            yield item.forward
            yield item.backward
        else:
            yield Segment(GeomPoint(*item[0]), GeomPoint(*item[1]))


def _turn(incoming, outgoing):
    """Signed turning angle in (-pi, pi], a reversal counting as -pi"""
    ax, ay = incoming
    bx, by = outgoing
    cross = ax * by - ay * bx
    dot = ax * bx + ay * by
    if cross == 0 and dot < 0:
        return -math.pi
    return math.atan2(cross, dot)


def reconnect(vectors):
    """
    Connect oriented segments into closed contours, always taking the
    leftmost unused continuation
    :param vectors: Segments and/or VectorPairs
    :return: list of Contour
    :raises OpenChainException: if some point has more incoming than
    outgoing segments or the reverse
    """
    segments = [s for s in _flatten(vectors) if s.origin != s.endpoint]
    outgoing = OrderedDict()
    balance = {}
    for k, s in enumerate(segments):
        outgoing.setdefault(s.origin, []).append(k)
        balance[s.origin] = balance.get(s.origin, 0) + 1
        balance[s.endpoint] = balance.get(s.endpoint, 0) - 1
    unbalanced = [p for p, b in balance.items() if b != 0]
    if unbalanced:
        raise OpenChainException(
            "{0} points have unequal in and out degree, first {1}".format(
                len(unbalanced), tuple(unbalanced[0])))

    def direction(k):
        s = segments[k]
        return (s.endpoint[0] - s.origin[0], s.endpoint[1] - s.origin[1])

    used = [False] * len(segments)
    contours = []
    for start in range(len(segments)):
        if used[start]:
            continue
        used[start] = True
        loop = [start]
        current = start
        while True:
            here = segments[current].endpoint
            options = [k for k in outgoing.get(here, []) if not used[k]]
            if segments[start].origin == here:
                options.append(start)
            incoming = direction(current)
            best = max(options, key=lambda k: (_turn(incoming, direction(k)),
                                               -k))
            if best == start:
                break
            used[best] = True
            loop.append(best)
            current = best
        contours.append(Contour([segments[k].origin for k in loop],
                                mode='region'))
    logger.info("Reconnected %d segments into %d contours", len(segments),
                len(contours))
    return contours
