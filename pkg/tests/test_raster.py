import numpy as np
import pytest

from contourforge.raster import (Grid, load_pgm, save_pgm, load_csv_grid,
                                 load_grid, threshold_select, iso_select)
from contourforge.utils import (MalformedHeaderException,
                                TruncatedDataException,
                                UnsupportedMagicException,
                                RaggedRowsException, NonNumericCellException,
                                FieldDimensionMismatchException)

PLAIN = b"P2\n# a comment\n3 2\n# another\n255\n1 2 3\n4 5 6\n"


def test_load_plain_pgm_flips_rows():
    grid = load_pgm(PLAIN)
    assert grid.width == 3
    assert grid.height == 2
    # the first image row is the top, so it becomes row 1
    assert grid.value(0, 1) == 1.0
    assert grid.value(2, 0) == 6.0


def test_load_raw_pgm():
    data = b"P5 2 2 255\n" + bytes([10, 20, 30, 40])
    grid = load_pgm(data)
    assert grid.values.tolist() == [[30.0, 40.0], [10.0, 20.0]]


def test_load_raw_pgm_16_bit():
    data = b"P5\n1 1\n65535\n" + bytes([0x12, 0x34])
    assert load_pgm(data).value(0, 0) == float(0x1234)


pgm_error_data = [
    (b"P3\n1 1\n255\n0 0 0\n", UnsupportedMagicException),
    (b"P6\n1 1\n255\n\x00\x00\x00", UnsupportedMagicException),
    (b"GIF89a", MalformedHeaderException),
    (b"P2\n3", MalformedHeaderException),
    (b"P2\n3 x\n255\n", MalformedHeaderException),
    (b"P2\n1 1\n70000\n0\n", MalformedHeaderException),
    (b"P2\n0 1\n255\n", MalformedHeaderException),
    (b"P2\n2 2\n255\n1 2 3\n", TruncatedDataException),
    (b"P5\n2 2\n255\n\x00\x01", TruncatedDataException),
]


@pytest.mark.parametrize("data, exception", pgm_error_data)
def test_load_pgm_errors(data, exception):
    with pytest.raises(exception):
        load_pgm(data)


@pytest.mark.parametrize("plain", [False, True])
def test_save_pgm_reloads(plain):
    grid = Grid([[0, 7, 255], [3, 4, 5]])
    assert load_pgm(save_pgm(grid, plain=plain)) == grid


def test_save_pgm_wide_values():
    grid = Grid([[0, 1000], [65535, 2]])
    data = save_pgm(grid)
    assert b"65535" in data.split(b"\n")[2]
    assert load_pgm(data) == grid


def test_load_csv_grid_keeps_row_order():
    grid = load_csv_grid("1,2,3\n4,5,6\n")
    assert grid.shape == (2, 3)
    assert grid.value(0, 0) == 1.0
    assert grid.value(2, 1) == 6.0


def test_load_csv_grid_fields():
    grid = load_csv_grid(["1,2\n3,4\n", "0.1,0.2\n0.3,0.4\n"],
                         field_names=["T", "ux"])
    assert sorted(grid.aux_fields) == ["ux"]
    assert grid.value(1, 1, "ux") == 0.4


csv_error_data = [
    (["1,2\n3\n"], RaggedRowsException),
    (["1,2\n3,x\n"], NonNumericCellException),
    (["1,nan\n"], NonNumericCellException),
    (["\n\n"], RaggedRowsException),
    (["1,2\n3,4\n", "1,2,3\n"], FieldDimensionMismatchException),
]


@pytest.mark.parametrize("texts, exception", csv_error_data)
def test_load_csv_grid_errors(texts, exception):
    with pytest.raises(exception):
        load_csv_grid(texts)


def test_grid_aux_shape_mismatch():
    with pytest.raises(FieldDimensionMismatchException):
        Grid([[1, 2]], aux_fields={"u": [[1], [2]]})


def test_grid_is_read_only():
    grid = Grid([[1, 2]])
    with pytest.raises(ValueError):
        grid.values[0, 0] = 5


interpolate_data = [
    (0.0, 0.0, 0.0),
    (1.0, 1.0, 3.0),
    (0.5, 0.0, 0.5),
    (0.5, 0.5, 1.5),
    (-3.0, 0.0, 0.0),
    (5.0, 5.0, 3.0),
]


@pytest.mark.parametrize("x, y, expected", interpolate_data)
def test_interpolate(x, y, expected):
    grid = Grid([[0, 1], [2, 3]])
    assert grid.interpolate(x, y) == pytest.approx(expected)


def test_corner_mean():
    grid = Grid([[0, 1], [2, 3]])
    assert grid.corner_mean(1, 1) == 1.5
    assert grid.corner_mean(0, 0) == 0.0
    assert grid.corner_mean(2, 0) == 1.0


def test_selections():
    grid = Grid([[0, 50, 100], [150, 200, 250]])
    assert threshold_select(grid, 50, 150).tolist() == [
        [False, True, True], [True, False, False]]
    assert iso_select(grid, 200).tolist() == [
        [False, False, False], [False, True, True]]
    with pytest.raises(ValueError):
        threshold_select(grid, 10, 5)


def test_load_grid_from_files(tmp_path):
    pgm = tmp_path / "image.pgm"
    pgm.write_bytes(PLAIN)
    assert load_grid(str(pgm)) == load_pgm(PLAIN)
    table = tmp_path / "t.csv"
    table.write_text("1,2\n3,4\n")
    grid = load_grid([str(table)], fmt="csv")
    assert np.array_equal(grid.values, [[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        load_grid(str(pgm), fmt="png")
