"""
Grid data model and ingestion of PGM images and CSV simulation tables.

Rows are stored bottom-up: row 0 is the visual bottom row of an image and
the first line of a CSV table.
"""
import csv
import io
import logging
import re

import numpy as np

from .utils import (MalformedHeaderException, TruncatedDataException,
                    UnsupportedMagicException, RaggedRowsException,
                    NonNumericCellException, FieldDimensionMismatchException)

logger = logging.getLogger(__name__)

_HEADER_TOKEN = re.compile(br'\s*(?:#[^\n]*\n\s*)*([^\s#]+)')


class Grid(object):
    """
    Rectangular raster of scalar values indexed as values[row, col], with
    optional auxiliary layers of identical shape.
    """

    def __init__(self, values, aux_fields=None, name=None):
        values = np.array(values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("Grid values must be a non-empty 2D table")
        if not np.all(np.isfinite(values)):
            raise ValueError("Grid values must be finite")
        values.setflags(write=False)
        self.values = values
        self.name = name
        self.aux_fields = {}
        for key, layer in (aux_fields or {}).items():
            layer = np.array(layer, dtype=float)
            if layer.shape != values.shape:
                raise FieldDimensionMismatchException(
                    "Field {0} has shape {1}, expected {2}".format(
                        key, layer.shape, values.shape))
            layer.setflags(write=False)
            self.aux_fields[key] = layer

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return (self.shape == other.shape and
                np.array_equal(self.values, other.values) and
                sorted(self.aux_fields) == sorted(other.aux_fields) and
                all(np.array_equal(layer, other.aux_fields[key])
                    for key, layer in self.aux_fields.items()))

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __repr__(self):
        return "Grid({0}x{1}, aux={2})".format(
            self.width, self.height, sorted(self.aux_fields))

    def contains(self, col, row):
        return 0 <= col < self.width and 0 <= row < self.height

    def value(self, col, row, field=None):
        layer = self.values if field is None else self.aux_fields[field]
        return float(layer[row, col])

    def interpolate(self, x, y, field=None):
        """
        Bilinear interpolation on the lattice of pixel centers. Points
        outside the lattice are clamped onto it.
        """
        layer = self.values if field is None else self.aux_fields[field]
        x = min(max(float(x), 0.0), self.width - 1.0)
        y = min(max(float(y), 0.0), self.height - 1.0)
        c0 = min(int(np.floor(x)), self.width - 1)
        r0 = min(int(np.floor(y)), self.height - 1)
        c1 = min(c0 + 1, self.width - 1)
        r1 = min(r0 + 1, self.height - 1)
        fx = x - c0
        fy = y - r0
        bottom = layer[r0, c0] * (1 - fx) + layer[r0, c1] * fx
        top = layer[r1, c0] * (1 - fx) + layer[r1, c1] * fx
        return float(bottom * (1 - fy) + top * fy)

    def corner_mean(self, i, j):
        """
        Mean of the up to four pixels around lattice corner (i, j), the
        corner at (i - 0.5, j - 0.5). Pixels outside the grid are skipped.
        """
        rows = slice(max(j - 1, 0), min(j + 1, self.height))
        cols = slice(max(i - 1, 0), min(i + 1, self.width))
        return float(self.values[rows, cols].mean())


def _next_token(data, pos):
    match = _HEADER_TOKEN.match(data, pos)
    if match is None:
        raise MalformedHeaderException("PGM header ends prematurely")
    return match.group(1), match.end()


def _header_int(data, pos, what):
    token, pos = _next_token(data, pos)
    if not token.isdigit():
        raise MalformedHeaderException(
            "PGM {0} is not a positive integer: {1!r}".format(what, token))
    return int(token), pos


def load_pgm(data, name=None):
    """
    Parse a plain (P2) or raw (P5) PGM byte stream
    :param data: bytes
    :return: Grid with the bottom image row as row 0
    :raises UnsupportedMagicException: for any other netpbm flavour
    :raises MalformedHeaderException: for unparsable headers
    :raises TruncatedDataException: when fewer samples than announced
    """
    if len(data) < 2 or data[:1] != b'P':
        raise MalformedHeaderException("Not a netpbm stream")
    magic = data[:2]
    if magic not in (b'P2', b'P5'):
        raise UnsupportedMagicException(
            "Unsupported magic {0!r}".format(magic.decode('ascii', 'replace')))
    pos = 2
    width, pos = _header_int(data, pos, 'width')
    height, pos = _header_int(data, pos, 'height')
    maxval, pos = _header_int(data, pos, 'maxval')
    if width < 1 or height < 1:
        raise MalformedHeaderException("PGM dimensions must be positive")
    if not 0 < maxval <= 65535:
        raise MalformedHeaderException(
            "PGM maxval {0} outside 1..65535".format(maxval))
    count = width * height

    if magic == b'P2':
        tokens = data[pos:].split()
        if len(tokens) < count:
            raise TruncatedDataException(
                "Expected {0} samples, found {1}".format(count, len(tokens)))
        try:
            samples = np.array([int(t) for t in tokens[:count]], dtype=float)
        except ValueError:
            raise MalformedHeaderException("Non-integer sample in P2 data")
    else:
        # exactly one whitespace byte separates maxval from the raster
        pos += 1
        dtype = np.dtype('u1') if maxval < 256 else np.dtype('>u2')
        raw = data[pos:pos + count * dtype.itemsize]
        if len(raw) < count * dtype.itemsize:
            raise TruncatedDataException(
                "Expected {0} bytes of raster, found {1}".format(
                    count * dtype.itemsize, len(raw)))
        samples = np.frombuffer(raw, dtype=dtype).astype(float)

    values = samples.reshape(height, width)[::-1]
    logger.debug("Loaded %dx%d PGM (maxval %d)", width, height, maxval)
    return Grid(values, name=name)


def save_pgm(grid, plain=False):
    """
    Serialise a grid as PGM; values are rounded and clipped to 0..65535
    :param plain: write P2 text instead of raw P5
    :return: bytes
    """
    samples = np.clip(np.rint(grid.values[::-1]), 0, 65535).astype(int)
    maxval = max(int(samples.max()), 1)
    header = "{0}\n{1} {2}\n{3}\n".format(
        'P2' if plain else 'P5', grid.width, grid.height, maxval)
    if plain:
        body = "\n".join(" ".join(str(v) for v in row) for row in samples)
        return (header + body + "\n").encode('ascii')
    dtype = np.dtype('u1') if maxval < 256 else np.dtype('>u2')
    return header.encode('ascii') + samples.astype(dtype).tobytes()


def _parse_csv_table(text, field):
    rows = [row for row in csv.reader(io.StringIO(text))
            if row and any(cell.strip() for cell in row)]
    if not rows:
        raise RaggedRowsException("Field {0} has no rows".format(field))
    width = len(rows[0])
    table = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsException(
                "Field {0}: row {1} has {2} cells, expected {3}".format(
                    field, r, len(row), width))
        try:
            table.append([float(cell) for cell in row])
        except ValueError:
            raise NonNumericCellException(
                "Field {0}: non-numeric cell in row {1}".format(field, r))
    table = np.array(table, dtype=float)
    if not np.all(np.isfinite(table)):
        raise NonNumericCellException(
            "Field {0} holds non-finite values".format(field))
    return table


def load_csv_grid(texts, field_names=None, name=None):
    """
    Build a grid from one comma separated table per field. The first field
    becomes the grid values, the rest its auxiliary layers. The first line
    of a table is row 0.
    :param texts: a string, or one string per field name
    :param field_names: names of the fields, defaults to ["value"]
    """
    if isinstance(texts, str):
        texts = [texts]
    if field_names is None:
        field_names = ['value'] + ['field{0}'.format(i)
                                   for i in range(1, len(texts))]
    if len(texts) != len(field_names):
        raise ValueError("Need one table per field name")
    tables = [_parse_csv_table(text, field)
              for text, field in zip(texts, field_names)]
    for field, table in zip(field_names[1:], tables[1:]):
        if table.shape != tables[0].shape:
            raise FieldDimensionMismatchException(
                "Field {0} is {1[1]}x{1[0]}, {2} is {3[1]}x{3[0]}".format(
                    field, table.shape, field_names[0], tables[0].shape))
    aux = dict(zip(field_names[1:], tables[1:]))
    return Grid(tables[0], aux_fields=aux, name=name)


def load_grid(paths, fmt='pgm', field_names=None):
    """
    Read a grid from disk
    :param paths: a path or a list of paths (one per CSV field)
    :param fmt: 'pgm' or 'csv'
    """
    if isinstance(paths, str):
        paths = [paths]
    if fmt == 'pgm':
        if len(paths) != 1:
            raise ValueError("PGM input takes exactly one file")
        with open(paths[0], 'rb') as handle:
            return load_pgm(handle.read(), name=paths[0])
    if fmt == 'csv':
        texts = []
        for path in paths:
            with open(path, 'r', encoding='utf-8') as handle:
                texts.append(handle.read())
        return load_csv_grid(texts, field_names, name=paths[0])
    raise ValueError("Unknown grid format {0}".format(fmt))


def threshold_select(grid, lo, hi):
    """
    Selection mask of the cells with lo <= value <= hi
    :return: boolean numpy array indexed [row, col]
    """
    if lo > hi:
        raise ValueError("Lower bound {0} exceeds upper bound {1}".format(
            lo, hi))
    return (grid.values >= lo) & (grid.values <= hi)


def iso_select(grid, isovalue):
    """Selection mask of the cells with value >= isovalue"""
    return grid.values >= isovalue
