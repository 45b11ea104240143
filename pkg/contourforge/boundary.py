"""
Pixel boundary vectors, loop connection and the contours built from them.

Every selected pixel contributes one unit vector for each side it shares
with an unselected (or missing) neighbour, oriented so that the pixel lies
to its left. Directions are numbered counterclockwise: 0 runs along the
bottom side (+x), 1 along the right side (+y), 2 along the top side (-x)
and 3 along the left side (-y). Lattice corner (i, j) sits at
(i - 0.5, j - 0.5).
"""
import enum
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .models import (GeomPoint, PixelCoord, ContourVector, Contour,
                     CCW, CW)
from .utils import DanglingVectorException

logger = logging.getLogger(__name__)

# step taken by a vector of each direction
STEP_X = np.array([1, 0, -1, 0])
STEP_Y = np.array([0, 1, 0, -1])
# origin corner relative to the owner's lower left corner
ORIGIN_X = np.array([0, 1, 1, 0])
ORIGIN_Y = np.array([0, 0, 1, 1])
# pixel on the other side of the edge
ACROSS_X = np.array([0, 1, 0, -1])
ACROSS_Y = np.array([-1, 0, 1, 0])

MODES = ('dilated', 'bptc', 'vector')


class TurnPolicy(enum.Enum):
    LEFT = 'left'
    RIGHT = 'right'


class LocalGray(object):
    """
    Junction rule driven by the field: the corner value (mean of the four
    pixels around it) decides the turn. With above='left' a corner whose
    value exceeds the isovalue turns left and any other turns right;
    above='right' swaps the two.
    """

    def __init__(self, isovalue, grid, above='left'):
        if above not in ('left', 'right'):
            raise ValueError("above must be 'left' or 'right'")
        self.isovalue = isovalue
        self.grid = grid
        self.above = above

    def turns_left(self, i, j):
        hot = self.grid.corner_mean(i, j) > self.isovalue
        return hot == (self.above == 'left')

    def __repr__(self):
        return "LocalGray({0}, above={1})".format(self.isovalue, self.above)


def parse_policy(name, grid=None, isovalue=None):
    """
    :param name: 'left', 'right' or 'local-gray'
    """
    if name in ('left', 'right'):
        return TurnPolicy(name)
    if name == 'local-gray':
        if grid is None or isovalue is None:
            raise ValueError("local-gray policy needs a grid and isovalue")
        return LocalGray(isovalue, grid)
    raise ValueError("Unknown turn policy {0}".format(name))


class VectorSet(object):
    """
    Boundary vectors of one extraction, kept as parallel integer arrays
    sorted by (row, col, direction) of their owner pixel.
    """

    def __init__(self, rows, cols, dirs, shape=None):
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.dirs = np.asarray(dirs, dtype=np.int64)
        self.shape = shape
        self._origins = None
        self._ends = None

    @classmethod
    def from_vectors(cls, vectors, shape=None):
        """
        Build a set from arbitrary ContourVectors.
        :raises DanglingVectorException: for vectors that are not unit
        steps between lattice corners, carry the wrong owner or repeat
        """
        rows, cols, dirs = [], [], []
        seen = set()
        for vector in vectors:
            ox, oy = vector.origin
            ex, ey = vector.endpoint
            step = (ex - ox, ey - oy)
            steps = list(zip(STEP_X.tolist(), STEP_Y.tolist()))
            if step not in steps:
                raise DanglingVectorException(
                    "Vector {0} -> {1} is not a unit lattice step".format(
                        vector.origin, vector.endpoint))
            if (ox + 0.5) % 1 != 0 or (oy + 0.5) % 1 != 0:
                raise DanglingVectorException(
                    "Vector origin {0} is not a pixel corner".format(
                        vector.origin))
            d = steps.index(step)
            col = int(ox + 0.5) - int(ORIGIN_X[d])
            row = int(oy + 0.5) - int(ORIGIN_Y[d])
            if vector.owner is not None and tuple(vector.owner) != (col, row):
                raise DanglingVectorException(
                    "Owner {0} is not left of {1} -> {2}".format(
                        vector.owner, vector.origin, vector.endpoint))
            if (row, col, d) in seen:
                raise DanglingVectorException(
                    "Vector {0} -> {1} repeats".format(
                        vector.origin, vector.endpoint))
            seen.add((row, col, d))
            rows.append(row)
            cols.append(col)
            dirs.append(d)
        rows = np.array(rows, dtype=np.int64)
        cols = np.array(cols, dtype=np.int64)
        dirs = np.array(dirs, dtype=np.int64)
        order = np.lexsort((dirs, cols, rows))
        return cls(rows[order], cols[order], dirs[order], shape=shape)

    def __len__(self):
        return len(self.dirs)

    def __iter__(self):
        for k in range(len(self)):
            yield self.vector(k)

    def origin_corners(self):
        """Lattice corner (i, j) each vector starts from, computed once"""
        if self._origins is None:
            self._origins = (self.cols + ORIGIN_X[self.dirs],
                             self.rows + ORIGIN_Y[self.dirs])
        return self._origins

    def end_corners(self):
        if self._ends is None:
            oi, oj = self.origin_corners()
            self._ends = oi + STEP_X[self.dirs], oj + STEP_Y[self.dirs]
        return self._ends

    def neighbor_cells(self):
        """
        :return: (cols, rows, inside) arrays of the pixel across each vector
        """
        cols = self.cols + ACROSS_X[self.dirs]
        rows = self.rows + ACROSS_Y[self.dirs]
        inside = (cols >= 0) & (rows >= 0)
        if self.shape is not None:
            height, width = self.shape
            inside &= (cols < width) & (rows < height)
        return cols, rows, inside

    def owner(self, k):
        return PixelCoord(int(self.cols[k]), int(self.rows[k]))

    def neighbor(self, k):
        col = int(self.cols[k] + ACROSS_X[self.dirs[k]])
        row = int(self.rows[k] + ACROSS_Y[self.dirs[k]])
        if col < 0 or row < 0:
            return None
        if self.shape is not None:
            height, width = self.shape
            if col >= width or row >= height:
                return None
        return PixelCoord(col, row)

    def vector(self, k):
        d = self.dirs[k]
        ox = self.cols[k] + ORIGIN_X[d] - 0.5
        oy = self.rows[k] + ORIGIN_Y[d] - 0.5
        return ContourVector(GeomPoint(float(ox), float(oy)),
                             GeomPoint(float(ox + STEP_X[d]),
                                       float(oy + STEP_Y[d])),
                             self.owner(k))


def _emit_band(padded, r0, r1):
    """Vectors of rows r0..r1, ordered by (row, col, direction)"""
    inner = padded[r0 + 1:r1 + 1, 1:-1]
    width = inner.shape[1]
    across = (padded[r0:r1, 1:-1], padded[r0 + 1:r1 + 1, 2:],
              padded[r0 + 2:r1 + 2, 1:-1], padded[r0 + 1:r1 + 1, :-2])
    # one bit per exposed side
    code = np.zeros(inner.shape, dtype=np.uint8)
    for d, other in enumerate(across):
        code |= (inner & ~other).view(np.uint8) << d
    cells = np.flatnonzero(code)
    bits = np.unpackbits(code.ravel()[cells][:, None], axis=1,
                         bitorder='little')[:, :4]
    pick, dirs = np.nonzero(bits)
    rows, cols = np.divmod(cells[pick], width)
    return rows + r0, cols, dirs


def emit_vectors(mask, workers=1):
    """
    Boundary vectors of every selected pixel
    :param mask: boolean array indexed [row, col]
    :param workers: number of row bands emitted concurrently; the result
    does not depend on it
    :return: VectorSet
    """
    mask = np.asarray(mask, dtype=bool)
    height, width = mask.shape
    padded = np.pad(mask, 1, mode='constant', constant_values=False)
    workers = max(1, min(int(workers), height))
    bounds = np.linspace(0, height, workers + 1).astype(int)
    bands = [(bounds[k], bounds[k + 1]) for k in range(workers)
             if bounds[k] < bounds[k + 1]]
    if len(bands) == 1:
        parts = [_emit_band(padded, *bands[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(lambda b: _emit_band(padded, *b),
                                      bands))
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    dirs = np.concatenate([p[2] for p in parts])
    logger.debug("Emitted %d boundary vectors from %d pixels",
                 len(dirs), int(mask.sum()))
    return VectorSet(rows, cols, dirs, shape=mask.shape)


class VectorLoop(object):
    """A closed cyclic sequence of vectors from one VectorSet"""

    def __init__(self, vectors, indices):
        self.vectors = vectors
        self.indices = np.asarray(indices, dtype=np.int64)
        self._area = None

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        for k in self.indices:
            yield self.vectors.vector(k)

    def signed_area(self):
        """Area enclosed by the pixel corner polygon, exact"""
        if self._area is None:
            self._area = _corner_areas(self.vectors, [self])[0]
        return self._area

    @property
    def orientation(self):
        return CW if self.signed_area() < 0 else CCW


def _flatten(loops):
    """
    :return: (vector indices of all loops in order, start of every loop)
    """
    sizes = np.array([len(loop) for loop in loops], dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    return np.concatenate([loop.indices for loop in loops]), starts


def _corner_areas(vectors, loops):
    """Signed areas of the pixel corner polygons of several loops"""
    order, starts = _flatten(loops)
    oi, oj = vectors.origin_corners()
    x, y = oi[order], oj[order]
    nxt = np.arange(len(order)) + 1
    nxt[np.append(starts[1:], len(order)) - 1] = starts
    twice = np.add.reduceat(x * y[nxt] - x[nxt] * y, starts)
    return [int(t) / 2.0 for t in twice]


def _successors(vectors, policy):
    n = len(vectors)
    oi, oj = vectors.origin_corners()
    ei, ej = vectors.end_corners()
    min_i = int(min(oi.min(), ei.min()))
    min_j = int(min(oj.min(), ej.min()))
    at = -np.ones((int(max(oj.max(), ej.max())) - min_j + 1,
                   int(max(oi.max(), ei.max())) - min_i + 1, 4),
                  dtype=np.int64)
    at[oj - min_j, oi - min_i, vectors.dirs] = np.arange(n)

    degree = (at >= 0).sum(axis=2)
    if degree.max() > 2:
        j, i = np.argwhere(degree > 2)[0]
        raise DanglingVectorException(
            "Corner {0} has {1} outgoing vectors".format(
                (i + min_i - 0.5, j + min_j - 0.5), degree[j, i]))

    d = vectors.dirs
    here = at[ej - min_j, ei - min_i]
    rows = np.arange(n)
    left = here[rows, (d + 1) % 4]
    straight = here[rows, d]
    right = here[rows, (d + 3) % 4]
    back = here[rows, (d + 2) % 4]
    if np.any(back >= 0):
        k = int(np.argmax(back >= 0))
        raise DanglingVectorException(
            "Vector {0} has an antiparallel twin".format(vectors.vector(k)))
    options = (left >= 0).astype(int) + (straight >= 0) + (right >= 0)
    if np.any(options == 0):
        k = int(np.argmax(options == 0))
        raise DanglingVectorException(
            "Vector {0} has no successor".format(vectors.vector(k)))

    prefer_left = np.where(left >= 0, left,
                           np.where(straight >= 0, straight, right))
    prefer_right = np.where(right >= 0, right,
                            np.where(straight >= 0, straight, left))
    if isinstance(policy, LocalGray):
        succ = prefer_right.copy()
        for k in np.nonzero(options > 1)[0]:
            if policy.turns_left(int(ei[k]), int(ej[k])):
                succ[k] = prefer_left[k]
        single = options == 1
        succ[single] = prefer_left[single]
    elif TurnPolicy(policy) is TurnPolicy.LEFT:
        succ = prefer_left
    else:
        succ = prefer_right

    if n and np.bincount(succ, minlength=n).max() > 1:
        k = int(np.argmax(np.bincount(succ, minlength=n) > 1))
        raise DanglingVectorException(
            "Vector {0} is entered twice".format(vectors.vector(k)))
    return succ


def connect_loops(vectors, policy=TurnPolicy.LEFT):
    """
    Connect boundary vectors into closed loops. At a corner with two
    outgoing vectors the policy picks the successor.
    :param vectors: VectorSet
    :param policy: TurnPolicy or LocalGray
    :return: list of VectorLoop in order of their first vector
    :raises DanglingVectorException: when the vectors do not close up
    """
    n = len(vectors)
    if n == 0:
        return []
    succ = _successors(vectors, policy).tolist()
    visited = bytearray(n)
    order = []
    starts = []
    for start in range(n):
        if visited[start]:
            continue
        starts.append(len(order))
        k = start
        while not visited[k]:
            visited[k] = 1
            order.append(k)
            k = succ[k]
    order = np.array(order, dtype=np.int64)
    bounds = starts + [n]
    loops = [VectorLoop(vectors, order[s:e])
             for s, e in zip(bounds, bounds[1:])]
    logger.debug("Connected %d vectors into %d loops", n, len(loops))
    return loops


def _contours(loops, mode):
    """Build the contours of all loops from one pass over their vectors"""
    if not loops:
        return []
    vectors = loops[0].vectors
    order, starts = _flatten(loops)
    d = vectors.dirs[order]
    if mode == 'bptc':
        x = vectors.cols[order].astype(float)
        y = vectors.rows[order].astype(float)
    else:
        oi, oj = vectors.origin_corners()
        x = oi[order] - 0.5
        y = oj[order] - 0.5
        if mode == 'dilated':
            x = x + STEP_X[d] / 2.0
            y = y + STEP_Y[d] / 2.0
    points = np.column_stack((x, y)).tolist()
    owners = list(map(PixelCoord, vectors.cols[order].tolist(),
                      vectors.rows[order].tolist()))
    ncols, nrows, inside = vectors.neighbor_cells()
    neighbors = [PixelCoord(c, r) if ok else None for c, r, ok in zip(
        ncols[order].tolist(), nrows[order].tolist(),
        inside[order].tolist())]
    areas = _corner_areas(vectors, loops)
    bounds = starts.tolist() + [len(order)]
    result = []
    for loop, area, s, e in zip(loops, areas, bounds, bounds[1:]):
        loop._area = area
        result.append(Contour(points[s:e], mode=mode,
                              orientation=loop.orientation,
                              owners=owners[s:e], neighbors=neighbors[s:e]))
    return result


def dilate(loops):
    """Contours through the midpoints of the loop vectors"""
    return _contours(loops, 'dilated')


def trace_pixels(loops):
    """
    Boundary pixel tracing contours through the owner pixel centers.
    Repeated points are kept and flagged through Contour.duplicates.
    """
    return _contours(loops, 'bptc')


def outline(loops):
    """Contours through the vector origins (the pixel corner polygons)"""
    return _contours(loops, 'vector')


def extract_contours(mask, policy=TurnPolicy.LEFT, mode='dilated',
                     workers=1):
    """
    emit -> connect -> dilate, trace or outline
    :param mode: 'dilated', 'bptc' or 'vector'
    """
    builders = {'dilated': dilate, 'bptc': trace_pixels, 'vector': outline}
    if mode not in builders:
        raise ValueError("Unknown contour mode {0}".format(mode))
    loops = connect_loops(emit_vectors(mask, workers=workers), policy)
    return builders[mode](loops)
