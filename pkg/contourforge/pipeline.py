"""
Stage recipes behind the command line: each takes a grid and a pipeline
configuration and returns the JSON payload plus the layers to draw.
"""
import logging
import math
import warnings
from collections import namedtuple, OrderedDict

from .boundary import parse_policy, extract_contours
from .cdt import triangulate, triangulate_contours
from .closure import (Frame, GapPolicy, close_gaps, contour_vectors,
                      reconnect, skeleton_pairs, split_torsos)
from .fohs import extract_fohs
from .isofield import (build_range_vectors, displace_to_iso,
                       interpolated_value)
from .models import CCW
from .raster import iso_select, threshold_select
from .shapeops import (SimplifyParams, area_and_centroid, filter_by_length,
                       simplify, simplify_shared)
from .skeleton import (ChainKind, PruneParams, classify, decompose_chains,
                       extract_skeleton, prune)
from .utils import OpenChainException, winding_number

logger = logging.getLogger(__name__)

StageResult = namedtuple('StageResult', ['payload', 'layers', 'extra'])


def _layers(**kwargs):
    layers = OrderedDict([('contours', []), ('segments', []),
                          ('points', []), ('normals', [])])
    layers.update(kwargs)
    return layers


def selection_mask(grid, config):
    if config.iso is not None:
        return iso_select(grid, config.iso)
    lo, hi = config.range
    return threshold_select(grid, lo, hi)


def turn_policy(grid, config, default='left'):
    return parse_policy(config.policy or default, grid=grid,
                        isovalue=config.iso)


def shape_contours(grid, config, default_policy='left'):
    """Dilated contours, displaced onto the isovalue when one is set"""
    policy = turn_policy(grid, config, default_policy)
    contours = extract_contours(selection_mask(grid, config), policy,
                                mode='dilated', workers=config.threads)
    if config.iso is None:
        return contours
    return [displace_to_iso(c, build_range_vectors(c, grid), config.iso)
            for c in contours]


def run_extract(grid, config):
    mode = config.mode
    if mode == 'iso':
        contours = shape_contours(grid, config)
    else:
        policy = turn_policy(grid, config)
        contours = extract_contours(selection_mask(grid, config), policy,
                                    mode=mode, workers=config.threads)
    rows = []
    for contour in contours:
        row = contour.to_dict()
        if mode == 'iso':
            ranges = build_range_vectors(contour, grid)
            row['values'] = [interpolated_value(p, rv)
                             for p, rv in zip(contour.points, ranges)]
        rows.append(row)
    payload = OrderedDict([
        ('mode', mode), ('policy', config.policy or 'left'),
        ('count', len(contours)),
        ('shapes', sum(1 for c in contours if c.orientation == CCW)),
        ('contours', rows)])
    return StageResult(payload, _layers(contours=contours), {})


def _skeletonize(config, contours):
    tri = triangulate_contours(contours)
    classes = classify(tri)
    before = extract_skeleton(tri, classes)
    if config.prune:
        tri, classes, after = prune(tri, classes, PruneParams(config.rho0))
    else:
        after = before
    return tri, classes, before, after


def run_skeleton(grid, config):
    contours = shape_contours(grid, config)
    if config.simplify:
        mask = selection_mask(grid, config)
        contours = [simplify(c, SimplifyParams(config.w0), mask=mask,
                             allow_border=True) for c in contours]
    tri, classes, before, skeleton = _skeletonize(config, contours)
    chains = decompose_chains(tri, classes)
    kinds = OrderedDict((kind.value, 0) for kind in ChainKind)
    for chain in chains:
        kinds[chain.kind.value] += 1
    payload = OrderedDict([
        ('triangles', len(tri)),
        ('interior', sum(tri.interior)),
        ('classes_unpruned', before.histogram()),
        ('classes', skeleton.histogram()),
        ('chains', kinds),
        ('rho0', config.rho0 if config.prune else None),
        ('skeleton', skeleton.to_dict())])
    return StageResult(payload, _layers(contours=contours,
                                        segments=skeleton.segments,
                                        points=skeleton.points), {})


def run_partition(grid, config):
    contours = shape_contours(grid, config, default_policy='right')
    mask = selection_mask(grid, config)
    _, _, _, skeleton = _skeletonize(config, contours)
    frame = Frame(grid.width, grid.height).including(
        skeleton.adjacency().keys())
    gaps = close_gaps(skeleton, frame, GapPolicy(config.gap),
                      continuation=config.continuation,
                      strict=config.strict_gaps)
    loops = reconnect(skeleton_pairs(skeleton) + frame.vectors() + gaps)
    loops = simplify_shared(loops, SimplifyParams(config.w0), mask=mask,
                            allow_border=True, fixed=frame.corners)
    mesh = triangulate_contours(loops)
    groups = enclosing_regions(loops)
    payload = OrderedDict([
        ('regions', len(groups)),
        ('holes', sum(len(holes) for _, holes in groups)),
        ('points', len(mesh.points)),
        ('triangles', len(mesh)),
        ('gaps', [[list(p.forward.origin), list(p.forward.endpoint)]
                  for p in gaps]),
        ('area', sum(c.signed_area for c in loops)),
        ('contours', [OrderedDict([
            ('region', region.to_dict()),
            ('area', region.area + sum(h.signed_area for h in holes)),
            ('holes', [h.to_dict() for h in holes])])
            for region, holes in groups])])
    return StageResult(payload, _layers(
        contours=loops, segments=[p.forward for p in gaps]), {})


def run_refine(grid, config):
    """Split touching shapes along their torsos; the skeleton is not pruned"""
    contours = shape_contours(grid, config)
    tri = triangulate_contours(contours)
    classes = classify(tri)
    chains = decompose_chains(tri, classes)
    pairs = split_torsos(tri, classes, chains, contours)
    refined = reconnect(contour_vectors(contours) + pairs)
    before = sum(1 for c in contours if c.signed_area > 0)
    after = sum(1 for c in refined if c.signed_area > 0)
    payload = OrderedDict([
        ('before', before), ('after', after), ('splits', len(pairs)),
        ('pairs', [[list(p.forward.origin), list(p.forward.endpoint)]
                   for p in pairs]),
        ('contours', [c.to_dict() for c in refined])])
    return StageResult(payload, _layers(
        contours=refined, segments=[p.forward for p in pairs]), {})


def group_holes(contours):
    """Attach every hole to the smallest shape around it"""
    shapes = [c for c in contours if c.signed_area > 0]
    groups = OrderedDict((id(s), (s, [])) for s in shapes)
    for hole in (c for c in contours if c.signed_area < 0):
        around = [s for s in shapes
                  if winding_number(hole.points[0], s.points) != 0]
        if around:
            groups[id(min(around, key=lambda s: s.area))][1].append(hole)
    return list(groups.values())


def _left_of(contour):
    """A point just left of the first edge of a contour with nonzero length"""
    for p, q in contour.edges():
        dx, dy = q.x - p.x, q.y - p.y
        length = math.hypot(dx, dy)
        if length > 0.0:
            step = 1e-6 * length
            return ((p.x + q.x) / 2.0 - dy / length * step,
                    (p.y + q.y) / 2.0 + dx / length * step)
    return contour.points[0]


def enclosing_regions(loops):
    """
    Group the loops of a planar subdivision into regions. Every loop has
    its face on the left; a clockwise loop is the outer side of a part of
    the subdivision that does not touch the frame, so its face is the
    smallest counterclockwise loop around the point just left of it.
    :return: list of (region Contour, list of hole Contours)
    """
    regions = [c for c in loops if c.signed_area > 0]
    groups = OrderedDict((id(r), (r, [])) for r in regions)
    for hole in (c for c in loops if c.signed_area < 0):
        inside = _left_of(hole)
        around = [r for r in regions
                  if winding_number(inside, r.points) != 0]
        if not around:
            raise OpenChainException(
                "Loop at {0} lies in no region".format(hole.points[0]))
        groups[id(min(around, key=lambda r: r.area))][1].append(hole)
    return list(groups.values())


def run_centroids(grid, config):
    contours = filter_by_length(shape_contours(grid, config),
                                config.min_length)
    rows = []
    centroids = []
    for shape, holes in group_holes(contours):
        area, center = area_and_centroid(
            shape, triangulate_contours([shape] + holes))
        centroids.append(center)
        rows.append(OrderedDict([('x', center.x), ('y', center.y),
                                 ('area', area)]))
    payload = OrderedDict([('count', len(rows)), ('centroids', rows)])
    segments = []
    if config.corners:
        corners = Frame(grid.width, grid.height).corners
        points = list(OrderedDict.fromkeys(list(centroids) + corners))
        mesh = triangulate(points)
        payload['mesh'] = OrderedDict([
            ('points', [list(p) for p in mesh.points]),
            ('edges', [list(e) for e in mesh.edges()])])
        segments = [(mesh.points[u], mesh.points[v])
                    for u, v in mesh.edges()]
    return StageResult(payload, _layers(contours=contours, points=centroids,
                                        segments=segments), {})


def run_fohs(grid, config):
    if config.policy not in (None, 'left'):
        warnings.warn("Freeze-out surfaces always use left turns, "
                      "ignoring policy {0}".format(config.policy))
    surface = extract_fohs(grid, config.iso, workers=config.threads)
    normals = [((e.r_f, e.t_f), (e.r_f + e.dsigma_r, e.t_f + e.dsigma_t))
               for e in surface]
    payload = OrderedDict([('isovalue', surface.isovalue),
                           ('elements', len(surface)),
                           ('surface', surface.to_dict())])
    return StageResult(payload, _layers(contours=surface.contours,
                                        normals=normals),
                       {'surface': surface})


RECIPES = OrderedDict([
    ('extract', run_extract),
    ('skeleton', run_skeleton),
    ('partition', run_partition),
    ('refine', run_refine),
    ('centroids', run_centroids),
    ('fohs', run_fohs),
])
