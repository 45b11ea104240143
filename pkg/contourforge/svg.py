"""
SVG rendering of stage results.

One pixel is one user unit. Geometry is drawn in y-up pixel coordinates
inside a group that flips the y-axis, so the picture matches the input
image.
"""
import logging

from lxml import etree

from . import __version__

logger = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
NSMAP = {None: SVG_NS}

# grids with more pixels than this are drawn without their pixels
MAX_BACKGROUND_PIXELS = 128 * 128

STYLES = {
    'shape': {'fill': 'none', 'stroke': '#1f77b4', 'stroke-width': '0.15'},
    'hole': {'fill': 'none', 'stroke': '#d62728', 'stroke-width': '0.15'},
    'segment': {'stroke': '#2ca02c', 'stroke-width': '0.25'},
    'point': {'fill': '#000000'},
    'normal': {'stroke': '#ff7f0e', 'stroke-width': '0.1'},
}


def _num(value):
    return "{0:.6g}".format(value)


def _tag(name):
    return "{{{0}}}{1}".format(SVG_NS, name)


def _styled(parent, name, style, **attrs):
    element = etree.SubElement(parent, _tag(name))
    for key, value in sorted(STYLES[style].items()):
        element.set(key, value)
    for key, value in attrs.items():
        element.set(key.replace('_', '-'), value)
    return element


def _gray(value, lo, hi):
    level = 0 if hi == lo else int(round(255 * (value - lo) / (hi - lo)))
    return "#{0:02x}{0:02x}{0:02x}".format(level)


def _draw_pixels(parent, grid):
    group = etree.SubElement(parent, _tag('g'), id='pixels')
    lo, hi = float(grid.values.min()), float(grid.values.max())
    for row in range(grid.height):
        for col in range(grid.width):
            etree.SubElement(group, _tag('rect'), {
                'x': _num(col - 0.5), 'y': _num(row - 0.5),
                'width': '1', 'height': '1',
                'fill': _gray(grid.value(col, row), lo, hi)})


def _draw_contours(parent, contours):
    group = etree.SubElement(parent, _tag('g'), id='contours')
    for contour in contours:
        points = " ".join("{0},{1}".format(_num(p.x), _num(p.y))
                          for p in contour)
        style = 'hole' if contour.signed_area < 0 else 'shape'
        _styled(group, 'polygon', style, points=points)


def _draw_lines(parent, name, style, lines):
    group = etree.SubElement(parent, _tag('g'), id=name)
    for p, q in lines:
        _styled(group, 'line', style, x1=_num(p[0]), y1=_num(p[1]),
                x2=_num(q[0]), y2=_num(q[1]))


def _draw_points(parent, points):
    group = etree.SubElement(parent, _tag('g'), id='points')
    for p in points:
        _styled(group, 'circle', 'point', cx=_num(p[0]), cy=_num(p[1]),
                r='0.3')


def render(grid, layers, title=None):
    """
    Build the SVG document of a stage result
    :param grid: the input Grid, for size and background
    :param layers: mapping with 'contours', 'segments', 'points' and
    'normals' lists, as returned by the stage recipes
    :param title: optional document title
    :return: lxml Element
    """
    width, height = grid.width, grid.height
    root = etree.Element(_tag('svg'), nsmap=NSMAP)
    root.set('version', '1.1')
    root.set('width', str(width))
    root.set('height', str(height))
    root.set('viewBox', "-0.5 -0.5 {0} {1}".format(width, height))
    root.append(etree.Comment(" contourforge {0} ".format(__version__)))
    if title is not None:
        etree.SubElement(root, _tag('title')).text = title
    flip = etree.SubElement(root, _tag('g'), id='scene')
    flip.set('transform', "matrix(1 0 0 -1 0 {0})".format(height - 1))
    if width * height <= MAX_BACKGROUND_PIXELS:
        _draw_pixels(flip, grid)
    else:
        logger.debug("Grid of %dx%d drawn without pixels", width, height)
    _draw_contours(flip, layers.get('contours', []))
    _draw_lines(flip, 'segments', 'segment',
                [(s[0], s[1]) for s in layers.get('segments', [])])
    _draw_lines(flip, 'normals', 'normal', layers.get('normals', []))
    _draw_points(flip, layers.get('points', []))
    return root


def to_bytes(document):
    return etree.tostring(document, pretty_print=True, xml_declaration=True,
                          encoding="UTF-8")
