"""
Exceptions and small geometry helpers shared by all stages.
"""
import math
import os
import re


class ContourForgeException(Exception):
    """Base of every error raised by contourforge"""

    kind = 'contourforge-error'

    def __init__(self, message=None, **details):
        if message is None:
            message = self.kind
        super(ContourForgeException, self).__init__(message)
        self.details = details


class InputException(ContourForgeException):
    kind = 'input-error'


class MalformedHeaderException(InputException):
    kind = 'malformed-header'


class TruncatedDataException(InputException):
    kind = 'truncated-data'


class UnsupportedMagicException(InputException):
    kind = 'unsupported-magic'


class RaggedRowsException(InputException):
    kind = 'ragged-rows'


class NonNumericCellException(InputException):
    kind = 'non-numeric-cell'


class FieldDimensionMismatchException(InputException):
    kind = 'field-dimension-mismatch'


class ConfigException(ContourForgeException):
    kind = 'config-error'


class PipelineException(ContourForgeException):
    kind = 'pipeline-error'


class DanglingVectorException(PipelineException):
    kind = 'dangling-vector'


class IsovalueOutOfRangeException(PipelineException):
    kind = 'isovalue-out-of-range'

    def __init__(self, index, isovalue, lo, hi):
        super(IsovalueOutOfRangeException, self).__init__(
            "Isovalue {0} outside [{1}, {2}] at point {3}".format(
                isovalue, lo, hi, index),
            index=index)
        self.index = index


class ContourGridMismatchException(PipelineException):
    kind = 'contour-grid-mismatch'


class CrossingConstraintsException(PipelineException):
    kind = 'crossing-constraints'


class DuplicatePointException(PipelineException):
    kind = 'duplicate-point'


class NoCandidateEdgeException(PipelineException):
    kind = 'no-candidate-edge'


class OpenChainException(PipelineException):
    kind = 'open-chain'


class ZeroAreaException(PipelineException):
    kind = 'zero-area'


class EmptySurfaceException(PipelineException):
    kind = 'empty-surface'


class AllEdgesDroppedException(PipelineException):
    kind = 'all-edges-dropped'


def default_workers(requested=None):
    """
    Worker count: the requested one capped by the CONTOURFORGE_THREADS
    environment variable, or the variable alone when nothing is requested
    :return: int >= 1
    :raises ConfigException: if the variable is set but not a positive int
    """
    raw = os.environ.get("CONTOURFORGE_THREADS")
    cap = None
    if raw is not None and raw.strip() != "":
        if not re.match(r'^\s*\d+\s*$', raw) or int(raw) < 1:
            raise ConfigException(
                "CONTOURFORGE_THREADS must be a positive integer, "
                "got {0!r}".format(raw))
        cap = int(raw)
    if requested is None:
        return cap or 1
    return min(requested, cap) if cap else requested


def signed_area(points):
    """
    Shoelace area of a closed polyline. Positive for counterclockwise
    :param points: sequence of (x, y)
    :return: float
    """
    n = len(points)
    if n < 3:
        return 0.0
    acc = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        acc += x0 * y1 - x1 * y0
    return acc / 2.0


def perimeter(points):
    n = len(points)
    if n < 2:
        return 0.0
    return sum(math.hypot(points[(i + 1) % n][0] - points[i][0],
                          points[(i + 1) % n][1] - points[i][1])
               for i in range(n))


def polygon_centroid(points):
    """
    Analytic centroid of a simple polygon
    :raises ZeroAreaException: for degenerate polygons
    """
    area = signed_area(points)
    if area == 0.0:
        raise ZeroAreaException("Polygon encloses no area")
    cx = cy = 0.0
    n = len(points)
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    return cx / (6.0 * area), cy / (6.0 * area)


def point_segment_distance(p, a, b):
    """Euclidean distance of p to the closed segment ab"""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    length2 = dx * dx + dy * dy
    if length2 == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / length2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy))


def midpoint(a, b):
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def triangle_centroid(a, b, c):
    return ((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0)


def triangle_area(a, b, c):
    """Signed area, positive for counterclockwise vertex order"""
    return ((b[0] - a[0]) * (c[1] - a[1]) -
            (b[1] - a[1]) * (c[0] - a[0])) / 2.0


def winding_number(point, polygon):
    """
    Number of counterclockwise turns the closed polygon makes around point
    :param polygon: sequence of (x, y), last point joins the first
    """
    px, py = point
    winding = 0
    n = len(polygon)
    for k in range(n):
        x0, y0 = polygon[k]
        x1, y1 = polygon[(k + 1) % n]
        side = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        if y0 <= py:
            if y1 > py and side > 0:
                winding += 1
        elif y1 <= py and side < 0:
            winding -= 1
    return winding
