"""
Contour down-sampling, filtering and area/centroid measurement.
"""
import logging
import math
from collections import namedtuple, OrderedDict

import numpy as np

from .cdt import triangulate_contours
from .models import Contour, GeomPoint
from .predicates import orient2d, segments_intersect
from .utils import (ZeroAreaException, point_segment_distance, signed_area,
                    triangle_area, triangle_centroid)

logger = logging.getLogger(__name__)

# chord samples per pixel width for the mask test
SAMPLES_PER_PIXEL = 4


class SimplifyParams(namedtuple('SimplifyParams', ['w0'])):
    """Removal tolerance in pixel widths"""

    def __new__(cls, w0=0.7):
        if w0 < 0:
            raise ValueError("w0 must not be negative, got {0}".format(w0))
        return super(SimplifyParams, cls).__new__(cls, float(w0))


class _MaskTest(object):
    """Does a chord stay on the union of the selected pixel squares"""

    def __init__(self, mask, allow_border=False):
        self.mask = np.asarray(mask, dtype=bool)
        self.allow_border = allow_border

    def _on_border(self, x, y):
        height, width = self.mask.shape
        right, top = width - 0.5, height - 0.5
        inside = -0.5 <= x <= right and -0.5 <= y <= top
        return inside and (x in (-0.5, right) or y in (-0.5, top))

    def _covered(self, x, y):
        height, width = self.mask.shape
        cols = set([int(math.floor(x + 0.5)), int(math.ceil(x - 0.5))])
        rows = set([int(math.floor(y + 0.5)), int(math.ceil(y - 0.5))])
        for col in cols:
            for row in rows:
                if (0 <= col < width and 0 <= row < height and
                        self.mask[row, col]):
                    return True
        return False

    def __call__(self, p, q):
        steps = max(1, int(math.ceil(
            math.hypot(q[0] - p[0], q[1] - p[1]) * SAMPLES_PER_PIXEL)))
        border = self.allow_border and self._on_border(*p) and \
            self._on_border(*q) and (p[0] == q[0] or p[1] == q[1])
        if border:
            return True
        for k in range(steps + 1):
            x = p[0] + (q[0] - p[0]) * k / float(steps)
            y = p[1] + (q[1] - p[1]) * k / float(steps)
            if not self._covered(x, y):
                return False
        return True


def _touching(a, b, p, q):
    """Segments ab and pq meet somewhere other than one shared endpoint"""
    shared = set([a, b]) & set([p, q])
    if len(shared) == 2:
        return True
    if not shared:
        return segments_intersect(a, b, p, q)
    s = shared.pop()
    far = q if p == s else p
    other = b if a == s else a
    if orient2d(a, b, far) != 0:
        return False
    # collinear: overlapping if both run the same way from the shared end
    return ((far[0] - s[0]) * (other[0] - s[0]) +
            (far[1] - s[1]) * (other[1] - s[1])) > 0


def _chord_ok(a, b, segments, skip):
    for k, (p, q) in enumerate(segments):
        if k in skip:
            continue
        if _touching(a, b, p, q):
            return False
    return True


def _within(group, a, b, w0):
    return all(point_segment_distance(p, a, b) <= w0 for p in group)


def simplify(contour, params=SimplifyParams(), mask=None,
             allow_border=False):
    """
    Drop support points while the contour stays within w0 of every dropped
    point, stays simple, keeps its orientation and, given a mask, stays on
    the selected pixels. Sweeps run in index order until nothing changes.
    :return: Contour with at least three points
    """
    pts = list(contour.points)
    if len(pts) <= 3:
        return contour
    mask_ok = _MaskTest(mask, allow_border) if mask is not None else None
    sign = math.copysign(1.0, signed_area(pts))
    dropped = [[] for _ in pts]
    changed = True
    while changed and len(pts) > 3:
        changed = False
        i = 0
        while i < len(pts) and len(pts) > 3:
            n = len(pts)
            prev, nxt = (i - 1) % n, (i + 1) % n
            a, b = pts[prev], pts[nxt]
            group = dropped[prev] + [pts[i]] + dropped[i]
            candidate = pts[:i] + pts[i + 1:]
            segments = [(pts[k], pts[(k + 1) % n]) for k in range(n)]
            area = signed_area(candidate)
            if (_within(group, a, b, params.w0) and area != 0.0 and
                    math.copysign(1.0, area) == sign and
                    _chord_ok(a, b, segments, (prev, i)) and
                    (mask_ok is None or mask_ok(a, b))):
                dropped[prev] = group
                del pts[i]
                del dropped[i]
                changed = True
            else:
                i += 1
    logger.debug("Simplified %d points to %d", len(contour), len(pts))
    return Contour(pts, mode=contour.mode, orientation=contour.orientation)


def _chains(contours, fixed):
    """Split contours into maximal runs between fixed vertices"""
    neighbours = OrderedDict()
    for contour in contours:
        pts = list(contour)
        for p, q in zip(pts, pts[1:] + pts[:1]):
            if p != q:
                neighbours.setdefault(p, set()).add(q)
                neighbours.setdefault(q, set()).add(p)
    anchors = set(p for p, nbrs in neighbours.items() if len(nbrs) != 2)
    anchors |= set(GeomPoint(*p) for p in fixed)
    layout = []
    for contour in contours:
        pts = [p for k, p in enumerate(contour.points)
               if p != contour.points[k - 1] or len(contour) == 1]
        starts = [k for k, p in enumerate(pts) if p in anchors]
        if not starts:
            first = min(range(len(pts)), key=lambda k: pts[k])
            anchors.add(pts[first])
            starts = [first]
        runs = []
        for s, e in zip(starts, starts[1:] + [starts[0] + len(pts)]):
            runs.append([pts[k % len(pts)] for k in range(s, e + 1)])
        layout.append(runs)
    return layout


def _chain_key(run):
    forward = tuple(run)
    backward = tuple(reversed(run))
    return min(forward, backward), forward <= backward


def simplify_shared(contours, params=SimplifyParams(), mask=None,
                    allow_border=False, fixed=()):
    """
    Simplify contours that share boundary sections so that the shared
    parts stay identical. Points where more than two boundary edges meet,
    and the given fixed points, never move.
    :return: list of Contour in input order
    """
    mask_ok = _MaskTest(mask, allow_border) if mask is not None else None
    layout = _chains(contours, fixed)
    chains = OrderedDict()
    for runs in layout:
        for run in runs:
            key, _ = _chain_key(run)
            chains.setdefault(key, list(key))
    dropped = dict((key, [[] for _ in key]) for key in chains)

    def all_segments():
        for key, pts in chains.items():
            for k in range(len(pts) - 1):
                yield key, k, pts[k], pts[k + 1]

    changed = True
    while changed:
        changed = False
        for key, pts in chains.items():
            closed = pts[0] == pts[-1]
            i = 1
            while i < len(pts) - 1:
                if closed and len(pts) <= 4:
                    break
                a, b = pts[i - 1], pts[i + 1]
                group = dropped[key][i - 1] + [pts[i]] + dropped[key][i]
                ok = _within(group, a, b, params.w0)
                if ok:
                    for other, k, p, q in all_segments():
                        if other == key and k in (i - 1, i):
                            continue
                        if _touching(a, b, p, q):
                            ok = False
                            break
                if ok and mask_ok is not None:
                    ok = mask_ok(a, b)
                if ok:
                    dropped[key][i - 1] = group
                    del pts[i]
                    del dropped[key][i]
                    changed = True
                else:
                    i += 1

    result = []
    for contour, runs in zip(contours, layout):
        points = []
        for run in runs:
            key, forward = _chain_key(run)
            simplified = chains[key] if forward else chains[key][::-1]
            points.extend(simplified[:-1])
        result.append(Contour(points, mode=contour.mode,
                              orientation=contour.orientation))
    logger.debug("Simplified %d shared chains", len(chains))
    return result


def filter_by_length(contours, min_length):
    """Keep the contours whose perimeter exceeds min_length"""
    return [c for c in contours if c.perimeter > min_length]


def area_and_centroid(contour, tri=None):
    """
    Area and center of mass as the area weighted sum of the interior
    triangles
    :param tri: triangulation of the contour, built when not given
    :return: (area, GeomPoint)
    :raises ZeroAreaException: for contours that enclose nothing
    """
    if tri is None:
        tri = triangulate_contours([contour])
    area = cx = cy = 0.0
    for t in tri.interior_indices():
        a, b, c = tri.triangle_points(t)
        part = triangle_area(a, b, c)
        mx, my = triangle_centroid(a, b, c)
        area += part
        cx += mx * part
        cy += my * part
    if area <= 0.0:
        raise ZeroAreaException("Contour {0!r} encloses no area".format(
            contour))
    return area, GeomPoint(cx / area, cy / area)
