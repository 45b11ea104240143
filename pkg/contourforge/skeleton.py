"""
Chordal skeletons of triangulated shapes.

Interior triangles are classified by how many of their edges are external
(a constraint edge, a virtual edge left by pruning, or an edge without an
interior triangle behind it). The skeleton joins the midpoints of internal
edges; insignificant branches are pruned junction by junction and the
remaining triangle chains are labelled as limbs and torsos.
"""
import enum
import logging
from collections import namedtuple, deque, Counter, OrderedDict

from .models import GeomPoint, Segment
from .utils import midpoint, triangle_centroid, point_segment_distance

logger = logging.getLogger(__name__)


class TriClass(enum.Enum):
    JUNCTION = 0
    SLEEVE = 1
    TERMINATED = 2
    ISOLATED = 3

    @property
    def external_edges(self):
        return self.value


class ChainKind(enum.Enum):
    LIMB = 'limb'
    TORSO = 'torso'
    DEGENERATE_LIMB = 'degenerate-limb'
    DEGENERATE_TORSO = 'degenerate-torso'


ChainComplex = namedtuple('ChainComplex', ['kind', 'triangles'])


class PruneParams(namedtuple('PruneParams', ['rho0'])):
    """Threshold on the ratio of morphological significance"""

    def __new__(cls, rho0=0.6):
        if rho0 < 0:
            raise ValueError("rho0 must not be negative, got {0}".format(rho0))
        return super(PruneParams, cls).__new__(cls, float(rho0))


def _internal_edges(tri, t, interior):
    """(edge slot, neighbour) pairs through which t touches the shape"""
    result = []
    a = tri.triangles[t]
    for k in range(3):
        n = tri.neighbors[t][k]
        u, v = a[k], a[(k + 1) % 3]
        if (n is not None and interior[n] and
                not tri.is_constrained(u, v) and not tri.is_virtual(u, v)):
            result.append((k, n))
    return result


def _classify(tri, interior):
    classes = OrderedDict()
    for t, flag in enumerate(interior):
        if flag:
            classes[t] = TriClass(3 - len(_internal_edges(tri, t, interior)))
    return classes


def classify(tri):
    """
    :return: OrderedDict triangle index -> TriClass, interior triangles only
    """
    return _classify(tri, tri.interior)


class Skeleton(object):
    """
    Skeleton segments with the triangle each one belongs to, centroid
    markers of isolated triangles and the nesting level of every junction.
    """

    def __init__(self, segments, owners, points, point_owners, classes,
                 levels):
        self.segments = list(segments)
        self.owners = list(owners)
        self.points = list(points)
        self.point_owners = list(point_owners)
        self.classes = classes
        self.levels = levels

    def __len__(self):
        return len(self.segments)

    def histogram(self):
        counts = Counter(c.name.lower() for c in self.classes.values())
        return dict((c.name.lower(), counts.get(c.name.lower(), 0))
                    for c in TriClass)

    def adjacency(self):
        graph = OrderedDict()
        for seg in self.segments:
            graph.setdefault(seg.origin, []).append(seg.endpoint)
            graph.setdefault(seg.endpoint, []).append(seg.origin)
        return graph

    def terminals(self):
        """
        Skeleton vertices of degree one
        :return: list of (terminal point, its only neighbour)
        """
        return [(p, nbrs[0]) for p, nbrs in self.adjacency().items()
                if len(nbrs) == 1]

    def to_dict(self):
        return {
            "segments": [[list(s.origin), list(s.endpoint)]
                         for s in self.segments],
            "points": [list(p) for p in self.points],
            "classes": self.histogram(),
            "junction_levels": [[t, level] for t, level
                                in sorted(self.levels.items())],
        }


def _nesting(tri, classes, interior):
    level = {}
    queue = deque()
    for t, cls in classes.items():
        if cls is not TriClass.JUNCTION:
            level[t] = 0
            queue.append(t)
    while queue:
        t = queue.popleft()
        for _, n in _internal_edges(tri, t, interior):
            if n not in level:
                level[n] = level[t] + 1
                queue.append(n)
    return OrderedDict((t, level.get(t, 0)) for t, cls in classes.items()
                       if cls is TriClass.JUNCTION)


def nesting_levels(tri, classes):
    """
    Hop distance from every junction triangle to the nearest triangle with
    an external edge
    :return: OrderedDict junction index -> level
    """
    return _nesting(tri, classes, tri.interior)


def extract_skeleton(tri, classes):
    segments, owners, points, point_owners = [], [], [], []
    for t, cls in classes.items():
        a = tri.triangles[t]
        pts = tri.triangle_points(t)
        internal = [k for k, _ in _internal_edges(tri, t, tri.interior)]
        mids = [GeomPoint(*midpoint(pts[k], pts[(k + 1) % 3]))
                for k in internal]
        if cls is TriClass.ISOLATED:
            points.append(GeomPoint(*triangle_centroid(*pts)))
            point_owners.append(t)
        elif cls is TriClass.TERMINATED:
            apex = tri.points[a[(internal[0] + 2) % 3]]
            segments.append(Segment(mids[0], apex))
            owners.append(t)
        elif cls is TriClass.SLEEVE:
            segments.append(Segment(mids[0], mids[1]))
            owners.append(t)
        else:
            center = GeomPoint(*triangle_centroid(*pts))
            for mid in mids:
                segments.append(Segment(mid, center))
                owners.append(t)
    return Skeleton(segments, owners, points, point_owners, classes,
                    nesting_levels(tri, classes))


def _branch(tri, junction, start, interior):
    """
    Triangles reachable from start without entering the junction
    :return: list of triangles, or None if the branch returns to the
    junction through another edge
    """
    seen = set([start])
    order = [start]
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for _, n in _internal_edges(tri, t, interior):
            if n == junction:
                if t != start:
                    return None
                continue
            if n not in seen:
                seen.add(n)
                order.append(n)
                queue.append(n)
    return order


def significance(tri, branch, a, b):
    """Largest distance of a branch vertex to the chord ab over |ab|"""
    pa, pb = tri.points[a], tri.points[b]
    length = ((pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2) ** 0.5
    vertices = set(v for t in branch for v in tri.triangles[t]) - set([a, b])
    if not vertices or length == 0.0:
        return 0.0
    return max(point_segment_distance(tri.points[v], pa, pb)
               for v in vertices) / length


def _cuts(tri, junctions, interior):
    """
    Every internal edge of the given junction triangles whose branch does
    not lead back to the junction
    :return: dict (junction, slot) -> set of branch triangles
    """
    cuts = OrderedDict()
    for j in junctions:
        for k, n in _internal_edges(tri, j, interior):
            branch = _branch(tri, j, n, interior)
            if branch is not None:
                cuts[(j, k)] = set(branch)
    return cuts


def prune(tri, classes, params=PruneParams()):
    """
    Remove skeleton branches whose significance stays below rho0.

    Every edge of every junction in `classes` is a possible cut; a junction
    keeps its cuts after it has been reclassified, so all three of its
    edges get judged. The least significant cut goes first (deeper
    junctions first on ties) and the significance of the cuts whose branch
    it shrank is updated, until the least significant cut left reaches
    rho0. The order of removals does not depend on rho0, so a larger rho0
    only ever removes more triangles.
    :return: (pruned Triangulation, its classes, its Skeleton)
    """
    interior = list(tri.interior)
    virtual = set(tri.virtual)
    junctions = [t for t, cls in classes.items()
                 if cls is TriClass.JUNCTION and interior[t]]
    levels = _nesting(tri, classes, interior)
    cuts = _cuts(tri, junctions, interior)

    def rho(cut):
        j, k = cut
        a = tri.triangles[j][k]
        b = tri.triangles[j][(k + 1) % 3]
        return significance(tri, cuts[cut], a, b)

    ratios = dict((cut, rho(cut)) for cut in cuts)
    removed_total = 0
    while cuts:
        cut = min(cuts, key=lambda c: (ratios[c], -levels.get(c[0], 0), c))
        if ratios[cut] >= params.rho0:
            break
        j, k = cut
        a = tri.triangles[j][k]
        b = tri.triangles[j][(k + 1) % 3]
        branch = cuts.pop(cut)
        del ratios[cut]
        for t in branch:
            interior[t] = False
        virtual.add((min(a, b), max(a, b)))
        removed_total += len(branch)
        logger.debug("Pruned %d triangles behind edge %d-%d of junction %d",
                     len(branch), a, b, j)
        for other in list(cuts):
            if other[0] in branch:
                del cuts[other]
                del ratios[other]
            elif j in cuts[other]:
                cuts[other] -= branch
                ratios[other] = rho(other)
    pruned = tri.with_interior(interior, virtual=virtual)
    pruned_classes = classify(pruned)
    logger.info("Pruning at rho0=%s removed %d triangles", params.rho0,
                removed_total)
    return pruned, pruned_classes, extract_skeleton(pruned, pruned_classes)


def _sleeve_walk(tri, classes, prev, cur, visited):
    seq = []
    while classes.get(cur) is TriClass.SLEEVE and cur not in visited:
        visited.add(cur)
        seq.append(cur)
        nxt = [n for _, n in _internal_edges(tri, cur, tri.interior)
               if n != prev]
        prev, cur = cur, nxt[0]
    return seq, cur


def decompose_chains(tri, classes):
    """
    Split the shape into chains of pairwise adjacent triangles: limbs run
    from a junction to a terminated triangle, torsos join two junctions,
    junction free strips are degenerate limbs and junction free cycles are
    degenerate torsos.
    :return: list of ChainComplex
    """
    chains = []
    visited = set()
    torsos = set()
    for j, cls in classes.items():
        if cls is not TriClass.JUNCTION:
            continue
        for _, n in _internal_edges(tri, j, tri.interior):
            if n in visited:
                continue
            seq, end = _sleeve_walk(tri, classes, j, n, visited)
            path = tuple([j] + seq + [end])
            if classes[end] is TriClass.TERMINATED:
                visited.add(end)
                chains.append(ChainComplex(ChainKind.LIMB, path))
            elif classes[end] is TriClass.JUNCTION:
                key = min(path, tuple(reversed(path)))
                if key not in torsos:
                    torsos.add(key)
                    chains.append(ChainComplex(ChainKind.TORSO, path))
    for t, cls in classes.items():
        if cls is not TriClass.TERMINATED or t in visited:
            continue
        visited.add(t)
        nbrs = [n for _, n in _internal_edges(tri, t, tri.interior)]
        seq, end = _sleeve_walk(tri, classes, t, nbrs[0], visited)
        visited.add(end)
        chains.append(ChainComplex(ChainKind.DEGENERATE_LIMB,
                                   tuple([t] + seq + [end])))
    for t, cls in classes.items():
        if cls is not TriClass.SLEEVE or t in visited:
            continue
        nbrs = [n for _, n in _internal_edges(tri, t, tri.interior)]
        visited.add(t)
        seq, _ = _sleeve_walk(tri, classes, t, nbrs[1], visited)
        chains.append(ChainComplex(ChainKind.DEGENERATE_TORSO,
                                   tuple([t] + seq)))
    logger.debug("Decomposed %d triangles into %d chains", len(classes),
                 len(chains))
    return chains
