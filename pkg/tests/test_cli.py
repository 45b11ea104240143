import json
import os

import pytest
from lxml import etree

from contourforge.cli import main, parse_range, PipelineConfig
from contourforge.pipeline import RECIPES
from contourforge.utils import ConfigException

BLOCK = b"""P2
4 4
255
0 0 0 0
0 200 200 0
0 200 200 0
0 0 0 0
"""


def _lattice(size=11, lines=(3, 7)):
    """A bright image crossed by dark rows and columns"""
    rows = []
    for row in range(size):
        cells = ['0' if row in lines or col in lines else '255'
                 for col in range(size)]
        rows.append(" ".join(cells))
    header = "P2\n{0} {0}\n255\n".format(size)
    return (header + "\n".join(rows) + "\n").encode('ascii')


@pytest.fixture
def block(tmp_path):
    path = tmp_path / 'block.pgm'
    path.write_bytes(BLOCK)
    return str(path)


def _error(capsys):
    lines = capsys.readouterr().err.strip().splitlines()
    return json.loads(lines[-1])


def _read_json(path):
    with open(path) as handle:
        return json.load(handle)


def test_extract_writes_document(block, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '--iso', '128', '-o', out]) == 0
    doc = _read_json(os.path.join(out, 'extract.json'))
    assert doc['schema'] == 1
    assert doc['command'] == 'extract'
    assert doc['config']['iso'] == 128.0
    assert doc['result']['count'] == 1
    assert doc['result']['shapes'] == 1
    assert os.listdir(out) == ['extract.json']


def test_extract_iso_mode_values(block, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '--iso', '100', '--mode', 'iso',
                 '-o', out]) == 0
    contour, = _read_json(os.path.join(out, 'extract.json'))['result'][
        'contours']
    assert contour['mode'] == 'iso'
    for value in contour['values']:
        assert value == pytest.approx(100.0) or value in (0.0, 200.0)


def test_svg_artifact(block, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '--range', '150:255', '--svg',
                 '-o', out]) == 0
    root = etree.parse(os.path.join(out, 'extract.svg')).getroot()
    assert root.tag == '{http://www.w3.org/2000/svg}svg'
    assert root.get('viewBox') == '-0.5 -0.5 4 4'


def test_no_command_prints_help(capsys):
    assert main([]) == 2
    assert 'usage' in capsys.readouterr().err


config_error_data = [
    ['extract', '-o', 'unused'],
    ['fohs', '--range', '0:1', '-o', 'unused'],
    ['extract', '--range', '5:1', '-o', 'unused'],
    ['extract', '--policy', 'local-gray', '--range', '0:1', '-o', 'unused'],
    ['extract', '--iso', '1', '--threads', '0', '-o', 'unused'],
    ['extract', '--iso', '1'],
]


@pytest.mark.parametrize("args", config_error_data)
def test_config_errors(args, block, tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(str(tmp_path))
    argv = args[:1] + ['-i', block] + args[1:]
    assert main(argv) == 2
    error = _error(capsys)
    assert error['exit_code'] == 2
    assert error['error'] == 'config-error'
    assert not os.path.exists('unused')


def test_missing_input(tmp_path, capsys):
    out = str(tmp_path / 'out')
    missing = str(tmp_path / 'missing.pgm')
    assert main(['extract', '-i', missing, '--iso', '1', '-o', out]) == 3
    assert _error(capsys)['exit_code'] == 3
    assert not os.path.exists(out)


def test_malformed_input(tmp_path, capsys):
    path = tmp_path / 'bad.pgm'
    path.write_bytes(b"P7\n1 1\n255\n0\n")
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', str(path), '--iso', '1', '-o', out]) == 3
    error = _error(capsys)
    assert error['exit_code'] == 3
    assert error['error'] == 'unsupported-magic'
    assert not os.path.exists(out)


def test_pipeline_error_writes_nothing(block, tmp_path, capsys):
    out = str(tmp_path / 'out')
    assert main(['fohs', '-i', block, '--iso', '250', '-o', out]) == 4
    assert _error(capsys)['exit_code'] == 4
    assert not os.path.exists(out)


def test_config_file_and_flags(block, tmp_path):
    config = tmp_path / 'settings.toml'
    config.write_text(u'iso = 128.0\nrho0 = 0.3\nsvg = true\n')
    out = str(tmp_path / 'out')
    assert main(['skeleton', '-i', block, '-c', str(config), '--rho0', '0.9',
                 '-o', out]) == 0
    doc = _read_json(os.path.join(out, 'skeleton.json'))
    assert doc['config']['rho0'] == 0.9
    assert doc['config']['iso'] == 128.0
    assert doc['result']['rho0'] == 0.9
    assert sorted(os.listdir(out)) == ['skeleton.json', 'skeleton.svg']


def test_config_file_errors(block, tmp_path, capsys):
    out = str(tmp_path / 'out')
    unknown = tmp_path / 'unknown.toml'
    unknown.write_text(u'isovalue = 1\n')
    assert main(['extract', '-i', block, '-c', str(unknown), '-o',
                 out]) == 2
    broken = tmp_path / 'broken.toml'
    broken.write_text(u'iso = = 1\n')
    assert main(['extract', '-i', block, '-c', str(broken), '-o', out]) == 2
    assert _error(capsys)['exit_code'] == 2


def test_partition_of_lattice(tmp_path):
    path = tmp_path / 'lattice.pgm'
    path.write_bytes(_lattice())
    out = str(tmp_path / 'out')
    assert main(['partition', '-i', str(path), '--range', '0:0',
                 '-o', out]) == 0
    result = _read_json(os.path.join(out, 'partition.json'))['result']
    assert result['regions'] == 9
    assert result['area'] == pytest.approx(121.0)


def test_partition_without_edges(tmp_path):
    path = tmp_path / 'blank.pgm'
    path.write_bytes(b"P2\n5 5\n255\n" + b"255 " * 25 + b"\n")
    out = str(tmp_path / 'out')
    assert main(['partition', '-i', str(path), '--range', '0:0',
                 '-o', out]) == 0
    result = _read_json(os.path.join(out, 'partition.json'))['result']
    assert result['regions'] == 1
    assert result['gaps'] == []
    assert result['area'] == pytest.approx(25.0)


def test_centroids_of_block(block, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['centroids', '-i', block, '--range', '150:255',
                 '-o', out]) == 0
    result = _read_json(os.path.join(out, 'centroids.json'))['result']
    center, = result['centroids']
    assert center['x'] == pytest.approx(1.5)
    assert center['y'] == pytest.approx(1.5)


def test_fohs_writes_csv(tmp_path):
    path = tmp_path / 'temperature.csv'
    rows = [",".join(str(100 - 5 * t - 4 * r) for r in range(12))
            for t in range(12)]
    path.write_text(u"\n".join(rows) + u"\n")
    out = str(tmp_path / 'out')
    assert main(['fohs', '-i', str(path), '--format', 'csv', '--iso', '70.5',
                 '-o', out]) == 0
    with open(os.path.join(out, 'fohs.csv')) as handle:
        header = handle.readline().strip()
    assert header == 't_f,r_f,dsigma_t,dsigma_r,T,pinned,contour'
    doc = _read_json(os.path.join(out, 'fohs.json'))
    assert doc['result']['elements'] > 0


range_data = [
    ("1:2", (1.0, 2.0)),
    ("-1.5:0", (-1.5, 0.0)),
    ([3, 4], (3.0, 4.0)),
]


@pytest.mark.parametrize("value, expected", range_data)
def test_parse_range(value, expected):
    assert parse_range(value) == expected


@pytest.mark.parametrize("value", ["1", "a:b", "1:2:3"])
def test_parse_range_errors(value):
    with pytest.raises(ConfigException):
        parse_range(value)


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigException):
        PipelineConfig(command='extract', isovalue=3)
    config = PipelineConfig(command='extract', fields='T, v')
    assert config.fields == ['T', 'v']


def _disks_pgm(width=48, height=40, radius=6,
               centers=((8, 8), (18, 8), (28, 8), (38, 8), (8, 30),
                        (30, 30))):
    rows = []
    for y in range(height):
        rows.append(" ".join(
            '255' if any((x - cx) ** 2 + (y - cy) ** 2 <= radius ** 2
                         for cx, cy in centers) else '0'
            for x in range(width)))
    header = "P2\n{0} {1}\n255\n".format(width, height)
    return (header + "\n".join(rows) + "\n").encode('ascii')


def test_skeleton_command(block, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['skeleton', '-i', block, '--iso', '128', '--no-prune',
                 '-o', out]) == 0
    result = _read_json(os.path.join(out, 'skeleton.json'))['result']
    assert result['rho0'] is None
    assert result['classes'] == result['classes_unpruned']
    assert result['interior'] > 0


def test_refine_command(tmp_path):
    path = tmp_path / 'disks.pgm'
    path.write_bytes(_disks_pgm())
    out = str(tmp_path / 'out')
    assert main(['refine', '-i', str(path), '--iso', '100', '--svg',
                 '-o', out]) == 0
    result = _read_json(os.path.join(out, 'refine.json'))['result']
    assert (result['before'], result['after']) == (3, 6)
    assert sorted(os.listdir(out)) == ['refine.json', 'refine.svg']


def test_environment_caps_threads(monkeypatch):
    monkeypatch.setenv("CONTOURFORGE_THREADS", "2")
    config = PipelineConfig(command='extract', input=['grid.pgm'],
                            out='out', iso=1.0, threads=8).validate()
    assert config.threads == 2


def test_failed_rename_leaves_nothing(block, tmp_path, monkeypatch, capsys):
    replace = os.replace
    calls = []

    def fail_second(src, dst):
        calls.append(dst)
        if len(calls) == 2:
            raise OSError("disk full")
        replace(src, dst)

    monkeypatch.setattr(os, 'replace', fail_second)
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '--iso', '128', '--svg',
                 '-o', out]) == 3
    error = _error(capsys)
    assert error['error'] == 'io-error'
    assert len(calls) == 2
    assert not os.path.exists(out)


def test_stage_value_error_is_pipeline_error(block, tmp_path, monkeypatch,
                                             capsys):
    def broken(grid, config):
        raise ValueError("bad geometry")

    monkeypatch.setitem(RECIPES, 'extract', broken)
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '--iso', '128', '-o', out]) == 4
    error = _error(capsys)
    assert error['exit_code'] == 4
    assert error['error'] == 'pipeline-error'
    assert not os.path.exists(out)


wrong_type_data = [
    u'rho0 = "x"\n',
    u'svg = 1\n',
    u'threads = 2.5\n',
]


@pytest.mark.parametrize("text", wrong_type_data)
def test_config_file_wrong_types(text, block, tmp_path, capsys):
    settings = tmp_path / 'settings.toml'
    settings.write_text(u'iso = 128.0\n' + text)
    out = str(tmp_path / 'out')
    assert main(['extract', '-i', block, '-c', str(settings), '-o',
                 out]) == 2
    error = _error(capsys)
    assert error['error'] == 'config-error'
    assert not os.path.exists(out)
