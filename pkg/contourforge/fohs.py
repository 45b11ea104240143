"""
Freeze-out hyper-surfaces of 1+1D hydrodynamic histories.

The grid holds the temperature with r along x (columns) and t along y
(rows), the cell center of the first row and column at r = t = 0. The
surface is the isotherm T = T_f around every hot region, split into edge
elements that carry an outward normal and the fields at their middle.
"""
import csv
import logging
from collections import namedtuple, OrderedDict

import numpy as np

from .boundary import TurnPolicy
from .isofield import extract_isocontours, interpolated_value, sample_fields
from .utils import EmptySurfaceException, AllEdgesDroppedException

logger = logging.getLogger(__name__)

FreezeoutElement = namedtuple('FreezeoutElement', [
    't_f', 'r_f', 'dsigma_t', 'dsigma_r', 'fields', 'pinned', 'contour'])


def _unphysical(point):
    return point[0] <= 0 or point[1] <= 0


def _endpoint_fields(point, rv, grid):
    if rv.pinned:
        col, row = rv.hi_pixel
        values = dict((name, grid.value(col, row, name))
                      for name in sorted(grid.aux_fields))
        values['T'] = grid.value(col, row)
    else:
        values = sample_fields(point, rv, grid)
        values['T'] = interpolated_value(point, rv)
    return values


class FreezeoutSurface(object):
    """Freeze-out elements in contour order, with their provenance"""

    def __init__(self, elements, isovalue, source=None, contours=()):
        self.elements = list(elements)
        self.isovalue = isovalue
        self.source = source
        self.contours = list(contours)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def field_names(self):
        names = set()
        for element in self.elements:
            names.update(element.fields)
        names.discard('T')
        return ['T'] + sorted(names)

    def to_rows(self):
        rows = []
        for element in self.elements:
            row = OrderedDict([
                ('t_f', element.t_f), ('r_f', element.r_f),
                ('dsigma_t', element.dsigma_t),
                ('dsigma_r', element.dsigma_r)])
            for name in self.field_names:
                row[name] = element.fields.get(name)
            row['pinned'] = element.pinned
            row['contour'] = element.contour
            rows.append(row)
        return rows

    def write_csv(self, handle):
        rows = self.to_rows()
        fieldnames = (['t_f', 'r_f', 'dsigma_t', 'dsigma_r'] +
                      self.field_names + ['pinned', 'contour'])
        writer = csv.DictWriter(handle, fieldnames=fieldnames,
                                lineterminator='\n')
        writer.writeheader()
        for row in rows:
            row['pinned'] = int(row['pinned'])
            writer.writerow(row)

    def to_dict(self):
        return {
            "isovalue": self.isovalue,
            "source": self.source,
            "elements": [dict(row) for row in self.to_rows()],
        }


def extract_fohs(grid, freezeout_temperature, workers=1):
    """
    Isotherm of the cells with T >= T_f, built with pixel disconnecting
    turns; points on the grid border are not moved. Edges whose two
    points both have r <= 0 or t <= 0 are dropped.
    :return: FreezeoutSurface
    :raises EmptySurfaceException: if no cell reaches T_f
    :raises AllEdgesDroppedException: if every edge is unphysical
    """
    if not np.any(grid.values >= freezeout_temperature):
        raise EmptySurfaceException(
            "No cell reaches T_f = {0}".format(freezeout_temperature))
    isocontours = extract_isocontours(grid, freezeout_temperature,
                                      TurnPolicy.LEFT, workers=workers)
    elements = []
    dropped = 0
    for index, (contour, ranges) in enumerate(isocontours):
        points = contour.points
        n = len(points)
        for k in range(n):
            p, q = points[k], points[(k + 1) % n]
            if p == q:
                continue
            if _unphysical(p) and _unphysical(q):
                dropped += 1
                continue
            fp = _endpoint_fields(p, ranges[k], grid)
            fq = _endpoint_fields(q, ranges[(k + 1) % n], grid)
            fields = dict((name, (fp[name] + fq[name]) / 2.0) for name in fp)
            dx, dy = q.x - p.x, q.y - p.y
            elements.append(FreezeoutElement(
                t_f=(p.y + q.y) / 2.0, r_f=(p.x + q.x) / 2.0,
                dsigma_t=-dx, dsigma_r=dy, fields=fields,
                pinned=ranges[k].pinned or ranges[(k + 1) % n].pinned,
                contour=index))
    if not elements:
        raise AllEdgesDroppedException(
            "All {0} isotherm edges lie at r <= 0 or t <= 0".format(dropped))
    logger.info("Freeze-out surface at T_f=%s: %d elements, %d edges "
                "dropped", freezeout_temperature, len(elements), dropped)
    return FreezeoutSurface(elements, freezeout_temperature,
                            source=grid.name,
                            contours=[c for c, _ in isocontours])
