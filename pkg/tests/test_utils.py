"""
test_utils.py
~~~~~~~~~~~~~

:license: MIT
"""
import pytest

from contourforge.utils import (signed_area, perimeter, polygon_centroid,
                                point_segment_distance, winding_number,
                                triangle_area, default_workers,
                                ConfigException, ZeroAreaException,
                                PipelineException, IsovalueOutOfRangeException,
                                MalformedHeaderException, InputException)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]

signed_area_data = [
    (SQUARE, 1.0),
    (list(reversed(SQUARE)), -1.0),
    (L_SHAPE, 3.0),
    ([(0, 0), (1, 1)], 0.0),
    ([(0, 0), (1, 0), (2, 0)], 0.0),
]


@pytest.mark.parametrize("points, expected", signed_area_data)
def test_signed_area(points, expected):
    assert signed_area(points) == expected


def test_perimeter():
    assert perimeter(SQUARE) == 4.0
    assert perimeter([(0, 0)]) == 0.0


centroid_data = [
    (SQUARE, (0.5, 0.5)),
    (L_SHAPE, (2.5 / 3, 2.5 / 3)),
    (list(reversed(L_SHAPE)), (2.5 / 3, 2.5 / 3)),
]


@pytest.mark.parametrize("points, expected", centroid_data)
def test_polygon_centroid(points, expected):
    cx, cy = polygon_centroid(points)
    assert cx == pytest.approx(expected[0], abs=1e-12)
    assert cy == pytest.approx(expected[1], abs=1e-12)


def test_polygon_centroid_zero_area():
    with pytest.raises(ZeroAreaException):
        polygon_centroid([(0, 0), (1, 0), (2, 0)])


distance_data = [
    ((0, 1), (0, 0), (2, 0), 1.0),
    ((1, -2), (0, 0), (2, 0), 2.0),
    ((3, 0), (0, 0), (2, 0), 1.0),
    ((-3, 4), (0, 0), (2, 0), 5.0),
    ((3, 4), (0, 0), (0, 0), 5.0),
]


@pytest.mark.parametrize("p, a, b, expected", distance_data)
def test_point_segment_distance(p, a, b, expected):
    assert point_segment_distance(p, a, b) == pytest.approx(expected)


winding_data = [
    ((0.5, 0.5), SQUARE, 1),
    ((0.5, 0.5), list(reversed(SQUARE)), -1),
    ((1.5, 0.5), SQUARE, 0),
    ((1.5, 1.5), L_SHAPE, 0),
    ((0.5, 1.5), L_SHAPE, 1),
]


@pytest.mark.parametrize("point, polygon, expected", winding_data)
def test_winding_number(point, polygon, expected):
    assert winding_number(point, polygon) == expected


def test_triangle_area_is_signed():
    assert triangle_area((0, 0), (2, 0), (0, 2)) == 2.0
    assert triangle_area((0, 0), (0, 2), (2, 0)) == -2.0


threads_data = [
    (None, 1),
    ("", 1),
    ("4", 4),
    (" 2 ", 2),
]


@pytest.mark.parametrize("raw, expected", threads_data)
def test_default_workers(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv("CONTOURFORGE_THREADS", raising=False)
    else:
        monkeypatch.setenv("CONTOURFORGE_THREADS", raw)
    assert default_workers() == expected


@pytest.mark.parametrize("raw", ["0", "-1", "two", "1.5"])
def test_default_workers_invalid(monkeypatch, raw):
    monkeypatch.setenv("CONTOURFORGE_THREADS", raw)
    with pytest.raises(ConfigException):
        default_workers()


def test_exception_kinds():
    err = IsovalueOutOfRangeException(3, 150.0, 0.0, 133.0)
    assert isinstance(err, PipelineException)
    assert err.kind == 'isovalue-out-of-range'
    assert err.index == 3
    assert err.details == {'index': 3}
    assert "150.0" in str(err)
    header = MalformedHeaderException()
    assert isinstance(header, InputException)
    assert str(header) == 'malformed-header'


capped_data = [
    (8, None, 8),
    (8, "2", 2),
    (1, "4", 1),
    (None, "3", 3),
]


@pytest.mark.parametrize("requested, raw, expected", capped_data)
def test_default_workers_caps_request(monkeypatch, requested, raw, expected):
    if raw is None:
        monkeypatch.delenv("CONTOURFORGE_THREADS", raising=False)
    else:
        monkeypatch.setenv("CONTOURFORGE_THREADS", raw)
    assert default_workers(requested) == expected
