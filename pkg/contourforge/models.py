"""
Value types shared by the contour stages.

Coordinates are in pixel units with y pointing up: pixel (col, row) has its
center at (col, row) and its corners at half-integer coordinates.
"""
from collections import namedtuple

from .utils import signed_area, perimeter

CCW = 'ccw'
CW = 'cw'

GeomPoint = namedtuple('GeomPoint', ['x', 'y'])
PixelCoord = namedtuple('PixelCoord', ['col', 'row'])

# owner lies to the left of origin -> endpoint
ContourVector = namedtuple('ContourVector', ['origin', 'endpoint', 'owner'])

# oriented segment without a pixel owner (skeleton, frame and gap vectors)
Segment = namedtuple('Segment', ['origin', 'endpoint'])


class Contour(object):
    """
    A closed oriented polyline. The last point connects to the first.

    `owners` and `neighbors` hold, per support point, the pixel pair that
    straddles the boundary edge the point came from (neighbor is None
    outside the grid). They are empty for contours that were not built
    from pixel boundary vectors.
    """

    def __init__(self, points, mode='dilated', orientation=None,
                 owners=None, neighbors=None):
        self.points = tuple(GeomPoint(float(p[0]), float(p[1]))
                            for p in points)
        if len(self.points) == 0:
            raise ValueError("A contour needs at least one point")
        self.mode = mode
        self.owners = tuple(owners) if owners is not None else ()
        self.neighbors = tuple(neighbors) if neighbors is not None else ()
        if self.owners and len(self.owners) != len(self.points):
            raise ValueError("Need one owner per point")
        self._area = signed_area(self.points)
        if orientation is None:
            orientation = CW if self._area < 0 else CCW
        self.orientation = orientation

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return "Contour({0}, {1} points, {2})".format(
            self.mode, len(self.points), self.orientation)

    @property
    def signed_area(self):
        return self._area

    @property
    def area(self):
        return abs(self._area)

    @property
    def perimeter(self):
        return perimeter(self.points)

    @property
    def is_shape(self):
        return self.orientation == CCW

    @property
    def is_hole(self):
        return self.orientation == CW

    @property
    def duplicates(self):
        """Per point: True if it repeats its predecessor"""
        n = len(self.points)
        return tuple(n > 1 and self.points[i] == self.points[i - 1]
                     for i in range(n))

    @property
    def degenerate(self):
        return any(self.duplicates) or self._area == 0.0

    def edges(self):
        n = len(self.points)
        return [(self.points[i], self.points[(i + 1) % n]) for i in range(n)]

    def with_points(self, points, mode=None):
        """Same connectivity, orientation and pixel sources, moved points"""
        if len(points) != len(self.points):
            raise ValueError("Point count must not change")
        return Contour(points, mode=mode or self.mode,
                       orientation=self.orientation,
                       owners=self.owners, neighbors=self.neighbors)

    def to_dict(self):
        return {
            "mode": self.mode,
            "orientation": self.orientation,
            "degenerate": self.degenerate,
            "area": self.area,
            "points": [[p.x, p.y] for p in self.points],
        }
