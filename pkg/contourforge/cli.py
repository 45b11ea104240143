"""
Command line front end: reads a grid, runs one pipeline command and writes
its artifacts.

Coordinates in every artifact are pixel units with y pointing up: pixel
(col, row) has its center at (col, row), and the first PGM row is the top
of the image, so it ends up at the largest y.
"""
import argparse
import io
import json
import logging
import os
import shutil
import sys
import tempfile
import warnings
from collections import OrderedDict

import numpy as np

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .boundary import MODES
from .closure import GapPolicy
from .pipeline import RECIPES
from .raster import load_grid
from .svg import render, to_bytes
from .utils import (ContourForgeException, ConfigException, InputException,
                    PipelineException, default_workers)

logger = logging.getLogger(__name__)

SCHEMA = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_PIPELINE = 4

POLICIES = ('left', 'right', 'local-gray')
FORMATS = ('pgm', 'csv')

# knobs that shape the results, echoed into the JSON document
RESULT_KEYS = ('format', 'fields', 'iso', 'range', 'policy', 'mode', 'rho0',
               'w0', 'gap', 'continuation', 'strict_gaps', 'min_length',
               'prune', 'simplify', 'corners')


def parse_range(value):
    """
    :param value: "LO:HI" or a (lo, hi) pair
    :return: (float, float)
    :raises ConfigException: if the value is not a pair of numbers
    """
    if isinstance(value, str):
        parts = value.split(':')
    else:
        try:
            parts = list(value)
        except TypeError:
            raise ConfigException("Range must be LO:HI, got {0!r}".format(
                value))
    if len(parts) != 2:
        raise ConfigException("Range must be LO:HI, got {0!r}".format(value))
    try:
        return float(parts[0]), float(parts[1])
    except (TypeError, ValueError):
        raise ConfigException("Range must be LO:HI, got {0!r}".format(value))


class PipelineConfig(object):
    """
    Every knob of the pipeline. Values come from the defaults, then an
    optional TOML file, then the command line; later sources win.
    """

    DEFAULTS = OrderedDict([
        ('command', None),
        ('input', []),
        ('format', 'pgm'),
        ('fields', None),
        ('iso', None),
        ('range', None),
        ('policy', None),
        ('mode', 'dilated'),
        ('rho0', 0.6),
        ('w0', 0.7),
        ('gap', 'shortest'),
        ('continuation', False),
        ('strict_gaps', False),
        ('min_length', 0.0),
        ('prune', True),
        ('simplify', False),
        ('corners', False),
        ('out', None),
        ('svg', False),
        ('threads', None),
    ])
    FLAGS = ('continuation', 'strict_gaps', 'prune', 'simplify', 'corners',
             'svg')

    def __init__(self, **values):
        for key, value in self.DEFAULTS.items():
            setattr(self, key, list(value) if isinstance(value, list)
                    else value)
        self.update(values)

    def update(self, values, source='arguments'):
        for key, value in values.items():
            key = key.replace('-', '_')
            if key not in self.DEFAULTS:
                raise ConfigException("Unknown setting {0!r} in {1}".format(
                    key, source))
            if key == 'input' and isinstance(value, str):
                value = [value]
            if key == 'fields' and isinstance(value, str):
                value = [f.strip() for f in value.split(',') if f.strip()]
            if key == 'range' and value is not None:
                value = parse_range(value)
            setattr(self, key, value)
        return self

    def update_from_file(self, path):
        """Merge the settings of a TOML file"""
        with open(path, 'rb') as handle:
            try:
                values = tomllib.load(handle)
            except (tomllib.TOMLDecodeError, UnicodeDecodeError) as e:
                raise ConfigException("Cannot parse {0}: {1}".format(path, e))
        return self.update(values, source=path)

    def as_dict(self, keys=None):
        keys = keys or self.DEFAULTS.keys()
        result = OrderedDict()
        for key in keys:
            value = getattr(self, key)
            result[key] = list(value) if isinstance(value, tuple) else value
        return result

    def validate(self):
        """
        :raises ConfigException: on the first invalid setting
        """
        if self.command not in RECIPES:
            raise ConfigException("Unknown command {0!r}".format(
                self.command))
        self._check_types()
        if not self.input:
            raise ConfigException("No input given")
        if self.format not in FORMATS:
            raise ConfigException("Unknown format {0!r}".format(self.format))
        if self.format == 'pgm' and len(self.input) != 1:
            raise ConfigException("PGM input takes exactly one file")
        if self.fields is not None and len(self.fields) != len(self.input):
            raise ConfigException(
                "Got {0} field names for {1} input files".format(
                    len(self.fields), len(self.input)))
        if self.out is None:
            raise ConfigException("No output directory given")
        if self.iso is not None and self.range is not None:
            raise ConfigException("Give either an isovalue or a range")
        if self.iso is None and self.range is None:
            raise ConfigException("Give an isovalue or a range")
        if self.range is not None and self.range[0] > self.range[1]:
            raise ConfigException("Range {0}:{1} is empty".format(
                *self.range))
        if self.command == 'fohs' and self.iso is None:
            raise ConfigException("fohs needs the freeze-out isovalue")
        if self.policy is not None and self.policy not in POLICIES:
            raise ConfigException("Unknown policy {0!r}".format(self.policy))
        if self.policy == 'local-gray' and self.iso is None:
            raise ConfigException("local-gray policy needs an isovalue")
        if self.mode not in MODES + ('iso',):
            raise ConfigException("Unknown mode {0!r}".format(self.mode))
        if self.mode == 'iso' and self.iso is None:
            raise ConfigException("iso mode needs an isovalue")
        if self.gap not in [p.value for p in GapPolicy]:
            raise ConfigException("Unknown gap policy {0!r}".format(
                self.gap))
        for key in ('rho0', 'w0', 'min_length'):
            if getattr(self, key) < 0:
                raise ConfigException("{0} must not be negative".format(key))
        if self.threads is not None and self.threads < 1:
            raise ConfigException("threads must be at least 1")
        self.threads = default_workers(self.threads)
        return self

    def _check_types(self):
        def fail(key, expected):
            raise ConfigException("{0} must be {1}, got {2!r}".format(
                key, expected, getattr(self, key)))

        for key in ('iso', 'rho0', 'w0', 'min_length'):
            value = getattr(self, key)
            if value is None and key == 'iso':
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                fail(key, "a number")
        for key in self.FLAGS:
            if not isinstance(getattr(self, key), bool):
                fail(key, "true or false")
        if self.threads is not None and (
                isinstance(self.threads, bool) or
                not isinstance(self.threads, int)):
            fail('threads', "an integer")
        for key in ('format', 'policy', 'mode', 'gap', 'out'):
            value = getattr(self, key)
            if value is not None and not isinstance(value, str):
                fail(key, "a string")
        for key in ('input', 'fields'):
            value = getattr(self, key)
            if value is not None and (
                    not isinstance(value, (list, tuple)) or
                    not all(isinstance(v, str) for v in value)):
                fail(key, "a list of strings")


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError("{0!r} is not JSON serializable".format(value))


def document(config, payload):
    doc = OrderedDict([
        ('schema', SCHEMA),
        ('command', config.command),
        ('version', __version__),
        ('config', config.as_dict(RESULT_KEYS)),
        ('result', payload),
    ])
    return json.dumps(doc, sort_keys=True, indent=2,
                      default=_jsonable) + "\n"


def artifacts(config, grid, result):
    """
    :return: list of (file name, bytes)
    """
    files = [("{0}.json".format(config.command),
              document(config, result.payload).encode('utf-8'))]
    if config.svg:
        svg = render(grid, result.layers, title=config.command)
        files.append(("{0}.svg".format(config.command), to_bytes(svg)))
    if 'surface' in result.extra:
        handle = io.StringIO()
        result.extra['surface'].write_csv(handle)
        files.append(("fohs.csv", handle.getvalue().encode('utf-8')))
    return files


def write_all(directory, files):
    """
    Write every artifact to a temporary file and rename them into place
    once all of them are written. On failure no new file stays behind.
    :param files: list of (file name, bytes)
    :return: list of written paths
    """
    created = not os.path.isdir(directory)
    if created:
        os.makedirs(directory)
    staged = []
    placed = []
    try:
        for name, data in files:
            fd, tmp = tempfile.mkstemp(prefix=".{0}.".format(name),
                                       dir=directory)
            staged.append((tmp, os.path.join(directory, name)))
            with os.fdopen(fd, 'wb') as handle:
                handle.write(data)
        for tmp, target in staged:
            os.replace(tmp, target)
            placed.append(target)
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)
        for target in placed:
            os.remove(target)
        if created:
            shutil.rmtree(directory, ignore_errors=True)
        raise
    return placed


def run(config):
    """
    Run a validated configuration and write its artifacts
    :return: list of written paths
    """
    try:
        grid = load_grid(config.input, fmt=config.format,
                         field_names=config.fields)
    except ValueError as e:
        raise InputException("Cannot read {0}: {1}".format(
            ", ".join(config.input), e))
    logger.info("Loaded %s: %dx%d", grid.name, grid.width, grid.height)
    result = RECIPES[config.command](grid, config)
    written = write_all(config.out, artifacts(config, grid, result))
    for path in written:
        logger.info("Wrote %s", path)
    return written


def _common_arguments():
    parent = argparse.ArgumentParser(add_help=False,
                                     argument_default=argparse.SUPPRESS)
    parent.add_argument('-i', '--input', action='append',
                        help="Input grid file. Repeat for the extra fields "
                             "of CSV input")
    parent.add_argument('--format', choices=FORMATS,
                        help="Input format. Defaults to pgm")
    parent.add_argument('--fields',
                        help="Comma separated field names, one per CSV "
                             "input. The first one is the selected field")
    select = parent.add_mutually_exclusive_group()
    select.add_argument('--iso', type=float,
                        help="Select cells with value >= ISO and displace "
                             "contours onto the isovalue")
    select.add_argument('--range', metavar='LO:HI',
                        help="Select cells with LO <= value <= HI")
    parent.add_argument('--policy', choices=POLICIES,
                        help="Junction turn policy. Defaults to right for "
                             "partition and left otherwise")
    parent.add_argument('--mode', choices=MODES + ('iso',),
                        help="Contour kind for extract. Defaults to dilated")
    parent.add_argument('--rho0', type=float,
                        help="Pruning threshold. Defaults to 0.6")
    parent.add_argument('--no-prune', dest='prune', action='store_false',
                        help="Keep the unpruned skeleton")
    parent.add_argument('--simplify', action='store_true',
                        help="Simplify contours before the skeleton")
    parent.add_argument('--w0', type=float,
                        help="Simplification tolerance in pixels. "
                             "Defaults to 0.7")
    parent.add_argument('--gap', choices=[p.value for p in GapPolicy],
                        help="Gap closure policy. Defaults to shortest")
    parent.add_argument('--continuation', action='store_true',
                        help="Let skeleton ends bridge to other ends")
    parent.add_argument('--strict-gaps', dest='strict_gaps',
                        action='store_true',
                        help="Fail when a skeleton end cannot be closed")
    parent.add_argument('--min-length', dest='min_length', type=float,
                        help="Drop contours not longer than this")
    parent.add_argument('--corners', action='store_true',
                        help="Triangulate the centroids with the image "
                             "corners")
    parent.add_argument('-o', '--out', help="Output directory")
    parent.add_argument('--svg', action='store_true',
                        help="Also write an SVG picture")
    parent.add_argument('-c', '--config',
                        help="TOML file with settings; flags win")
    parent.add_argument('--threads', type=int,
                        help="Worker count. Defaults to "
                             "$CONTOURFORGE_THREADS or 1")
    parent.add_argument('-v', '--verbose', action='count',
                        help="More logging, repeat for debug output")
    return parent


def build_parser():
    parser = argparse.ArgumentParser(
        prog='contourforge',
        description="Contours, skeletons and partitions of raster grids.",
        epilog="All coordinates are pixel units with y pointing up; "
               "the top row of a PGM image has the largest y.")
    parser.add_argument('--version', action='version',
                        version="%(prog)s {0}".format(__version__))
    commands = parser.add_subparsers(dest='command')
    parent = _common_arguments()
    helps = OrderedDict([
        ('extract', "Extract contours"),
        ('skeleton', "Chordal skeleton of the contours"),
        ('partition', "Close skeleton gaps and partition the image"),
        ('refine', "Split touching shapes at their narrowest neck"),
        ('centroids', "Area and centroid of every shape"),
        ('fohs', "Freeze-out surface of a temperature history"),
    ])
    for name, text in helps.items():
        commands.add_parser(name, parents=[parent], help=text,
                            description=text,
                            epilog=parser.epilog)
    return parser


def configure_logging(verbosity):
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    logging.captureWarnings(True)
    warnings.simplefilter('always')


def report_error(kind, message, code):
    json.dump(OrderedDict([('error', kind), ('message', message),
                           ('exit_code', code)]), sys.stderr)
    sys.stderr.write("\n")
    return code


def main(argv=None):
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    if args.get('command') is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    configure_logging(args.pop('verbose', 0))
    config_file = args.pop('config', None)
    try:
        config = PipelineConfig(command=args.pop('command'))
        if config_file is not None:
            config.update_from_file(config_file)
        config.update(args)
        config.validate()
        run(config)
    except ConfigException as e:
        return report_error(e.kind, str(e), EXIT_CONFIG)
    except InputException as e:
        return report_error(e.kind, str(e), EXIT_INPUT)
    except OSError as e:
        return report_error('io-error', str(e), EXIT_INPUT)
    except ContourForgeException as e:
        return report_error(e.kind, str(e), EXIT_PIPELINE)
    except ValueError as e:
        return report_error(PipelineException.kind, str(e), EXIT_PIPELINE)
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
