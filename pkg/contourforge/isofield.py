"""
Isocontours: dilated support points slide along the segment joining the two
pixel centers that straddle their boundary edge until the linearly
interpolated field equals the isovalue.
"""
import logging
import math
from collections import namedtuple

from .boundary import TurnPolicy, extract_contours
from .models import GeomPoint
from .raster import iso_select
from .utils import (ContourGridMismatchException,
                    IsovalueOutOfRangeException)

logger = logging.getLogger(__name__)

# origin sits on the center of the hotter pixel (the inner one on ties);
# pinned vectors have no outer pixel and never move
RangeVector = namedtuple('RangeVector', [
    'origin', 'endpoint', 'hi_value', 'lo_value', 'hi_pixel', 'lo_pixel',
    'pinned'])


def build_range_vectors(contour, grid):
    """
    One range vector per support point of a dilated contour
    :raises ContourGridMismatchException: if the contour's pixel sources
    do not belong to the grid
    """
    if not contour.owners:
        raise ContourGridMismatchException(
            "Contour carries no pixel sources")
    ranges = []
    for k, (owner, neighbor) in enumerate(zip(contour.owners,
                                              contour.neighbors)):
        if not grid.contains(*owner):
            raise ContourGridMismatchException(
                "Pixel {0} of point {1} is outside the {2}x{3} grid".format(
                    tuple(owner), k, grid.width, grid.height))
        inner = grid.value(*owner)
        if neighbor is None:
            point = contour.points[k]
            ranges.append(RangeVector(point, point, inner, inner,
                                      owner, None, True))
            continue
        if (not grid.contains(*neighbor) or
                abs(owner[0] - neighbor[0]) + abs(owner[1] - neighbor[1])
                != 1):
            raise ContourGridMismatchException(
                "Pixels {0} and {1} of point {2} are not edge "
                "neighbours".format(tuple(owner), tuple(neighbor), k))
        outer = grid.value(*neighbor)
        if outer > inner:
            hot, cold = neighbor, owner
        else:
            hot, cold = owner, neighbor
        ranges.append(RangeVector(
            GeomPoint(float(hot[0]), float(hot[1])),
            GeomPoint(float(cold[0]), float(cold[1])),
            max(inner, outer), min(inner, outer), hot, cold, False))
    return ranges


def displacement(range_vector, isovalue, index=None):
    """
    Fraction of the way from the hot to the cold pixel center at which the
    interpolated field equals the isovalue. A flat range keeps the middle.
    :raises IsovalueOutOfRangeException: if the isovalue is not spanned
    """
    hi = range_vector.hi_value
    lo = range_vector.lo_value
    if not lo <= isovalue <= hi:
        raise IsovalueOutOfRangeException(index, isovalue, lo, hi)
    if hi == lo:
        return 0.5
    return (hi - isovalue) / (hi - lo)


def _along(range_vector, t):
    ox, oy = range_vector.origin
    ex, ey = range_vector.endpoint
    return GeomPoint(ox + t * (ex - ox), oy + t * (ey - oy))


def displace_to_iso(contour, ranges, isovalue):
    """
    Move every support point that is not pinned onto the isovalue
    :return: Contour in mode 'iso' with unchanged connectivity
    """
    points = []
    for k, (point, rv) in enumerate(zip(contour.points, ranges)):
        if rv.pinned:
            points.append(point)
        else:
            points.append(_along(rv, displacement(rv, isovalue, index=k)))
    return contour.with_points(points, mode='iso')


def to_bptc_via_ranges(contour, ranges):
    """Move every support point that is not pinned to its hot pixel center"""
    points = [point if rv.pinned else rv.origin
              for point, rv in zip(contour.points, ranges)]
    return contour.with_points(points, mode='bptc')


def _parameter_of(point, rv):
    length = math.hypot(rv.endpoint[0] - rv.origin[0],
                        rv.endpoint[1] - rv.origin[1])
    if rv.pinned or length == 0.0:
        return 0.0
    t = math.hypot(point[0] - rv.origin[0], point[1] - rv.origin[1]) / length
    return min(1.0, max(0.0, t))


def sample_fields(point, range_vector, grid):
    """
    Auxiliary field values at a point lying on its range vector, using the
    same linear weights as the displacement
    :return: dict field name -> value
    """
    t = _parameter_of(point, range_vector)
    hot = range_vector.hi_pixel
    cold = range_vector.lo_pixel if range_vector.lo_pixel else hot
    return dict(
        (name, (1.0 - t) * grid.value(hot[0], hot[1], name) +
         t * grid.value(cold[0], cold[1], name))
        for name in sorted(grid.aux_fields))


def interpolated_value(point, range_vector):
    """Primary field value at a point lying on its range vector"""
    t = _parameter_of(point, range_vector)
    return ((1.0 - t) * range_vector.hi_value +
            t * range_vector.lo_value)


def extract_isocontours(grid, isovalue, policy=TurnPolicy.LEFT, workers=1):
    """
    Select value >= isovalue, build dilated contours and displace them
    :return: list of (iso Contour, list of RangeVector)
    """
    dilated = extract_contours(iso_select(grid, isovalue), policy,
                               mode='dilated', workers=workers)
    result = []
    for contour in dilated:
        ranges = build_range_vectors(contour, grid)
        result.append((displace_to_iso(contour, ranges, isovalue), ranges))
    logger.info("Built %d isocontours at %s", len(result), isovalue)
    return result
