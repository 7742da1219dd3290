"""
Experiment configuration read from INI files.

Every value has a default, so a configuration file only needs the keys that differ. Values are validated on load and
errors name the section, key and line of the offending entry.
"""
import configparser
import hashlib
import re
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

import numpy as np

from settings import DEFAULT_OUT_DIR, out_dir_from_env
from utils.errors import ConfigError

__all__ = ['ExperimentConfig', 'load_config', 'apply_overrides', 'config_hash', 'resolve_out_dir', 'parse_kappa_list',
           'parse_resolution', 'SECTIONS']

SECTIONS = ('seed', 'eos', 'grid', 'time', 'energy', 'tolerances', 'output')


@dataclass(frozen=True)
class ExperimentConfig:
    """Effective configuration of an experiment, one attribute per INI key."""
    # [seed]
    preset: str = 'irrotational-quadrupole'
    omega: float = 1.0
    coefficients: tuple = ()
    # [eos]
    family: str = 'linear'
    kappa: float = 100.0
    kappa_list: tuple = (1e2, 1e3, 1e4)
    c0: float = 1.0
    table: str = ''
    # [grid]
    n_r: int = 33
    n_theta: int = 64
    # [time]
    mode: str = 'compressible'
    T: float = 0.2
    dt: object = 'auto'
    cfl: float = 1.0
    sample_every: float = 0.02
    projection_every: int = 10
    filter_strength: float = 36.0
    # [energy]
    order: int = 0
    eps_min: float = 1e-6
    eta_threshold: float = 1.0
    # [tolerances]
    elliptic: float = 1e-10
    builder: float = 1e-10
    max_iter: int = 30
    sobolev_order: int = 5
    neumann_phi: bool = False
    # [output]
    directory: str = ''
    workers: int = 1
    source: str = field(default='', compare=False)

    @property
    def resolution(self):
        return self.n_r, self.n_theta

    @property
    def time_step(self):
        return None if self.dt == 'auto' else float(self.dt)

    @property
    def incompressible(self):
        return self.mode == 'incompressible' or np.isinf(self.kappa)


# key -> (section, parser)
def _float(value):
    return float(value)


def _int(value):
    return int(value)


def _bool(value):
    lowered = value.strip().lower()
    if lowered in ('1', 'yes', 'true', 'on'):
        return True
    if lowered in ('0', 'no', 'false', 'off'):
        return False
    raise ValueError(f'not a boolean: {value!r}')


def _floats(value):
    return tuple(float(v) for v in re.split(r'[,\s]+', value.strip()) if v)


def _dt(value):
    return 'auto' if value.strip().lower() == 'auto' else float(value)


KEYS = {
    'preset': ('seed', str), 'omega': ('seed', _float), 'coefficients': ('seed', _floats),
    'family': ('eos', str), 'kappa': ('eos', _float), 'kappa_list': ('eos', _floats), 'c0': ('eos', _float),
    'table': ('eos', str),
    'n_r': ('grid', _int), 'n_theta': ('grid', _int),
    'mode': ('time', str), 'T': ('time', _float), 'dt': ('time', _dt), 'cfl': ('time', _float),
    'sample_every': ('time', _float), 'projection_every': ('time', _int),
    'filter_strength': ('time', _float),
    'order': ('energy', _int), 'eps_min': ('energy', _float), 'eta_threshold': ('energy', _float),
    'elliptic': ('tolerances', _float), 'builder': ('tolerances', _float), 'max_iter': ('tolerances', _int),
    'sobolev_order': ('tolerances', _int), 'neumann_phi': ('tolerances', _bool),
    'directory': ('output', str), 'workers': ('output', _int),
}

_HASH_EXCLUDED = {'directory', 'workers', 'source'}


def _line_of(text, section, key):
    """Line number of `key` inside `[section]`, or None."""
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.match(r'^\[(.+)\]$', stripped)
        if header:
            current = header.group(1).strip()
        elif current == section and re.match(rf'^{re.escape(key)}\s*[=:]', stripped, flags=re.IGNORECASE):
            return number
    return None


def _validate(config, text=''):
    def fail(msg, key):
        section = KEYS[key][0]
        raise ConfigError(msg, section=section, key=key, line=_line_of(text, section, key))

    if config.preset not in ('irrotational-quadrupole', 'rigid-rotation', 'zero', 'linear'):
        fail(f'Unknown seed preset {config.preset!r}', 'preset')
    if config.preset == 'linear':
        if len(config.coefficients) != 4:
            fail('The linear preset needs four coefficients a11, a12, a21, a22', 'coefficients')
        if abs(config.coefficients[0] + config.coefficients[3]) > 1e-14:
            fail('The linear preset must be divergence free: a11 + a22 = 0', 'coefficients')
    if config.family not in ('linear', 'custom'):
        fail(f'Unknown EOS family {config.family!r}', 'family')
    if config.family == 'custom' and not config.table:
        fail('The custom family needs a table file', 'table')
    if not config.kappa > 0:
        fail(f'kappa must be positive, got {config.kappa}', 'kappa')
    if not config.kappa_list or any(not k > 0 for k in config.kappa_list):
        fail('kappa_list must hold positive values (inf allowed)', 'kappa_list')
    if not config.c0 > 0:
        fail('c0 must be positive', 'c0')
    if not 9 <= config.n_r <= 65:
        fail(f'n_r must lie in [9, 65], got {config.n_r}', 'n_r')
    if not 8 <= config.n_theta <= 256 or config.n_theta % 2:
        fail(f'n_theta must be even and lie in [8, 256], got {config.n_theta}', 'n_theta')
    if config.mode not in ('compressible', 'incompressible'):
        fail(f'Unknown time mode {config.mode!r}', 'mode')
    if not config.T >= 0:
        fail('T must be nonnegative', 'T')
    if config.dt != 'auto' and not config.dt > 0:
        fail('dt must be positive or auto', 'dt')
    if not 0 < config.cfl <= 2:
        fail(f'cfl must lie in (0, 2], got {config.cfl}', 'cfl')
    if config.sample_every < 0:
        fail('sample_every must be nonnegative', 'sample_every')
    if config.projection_every < 0:
        fail('projection_every must be nonnegative', 'projection_every')
    if not 0 <= config.filter_strength <= 100:
        fail(f'filter_strength must lie in [0, 100], got {config.filter_strength}', 'filter_strength')
    if not 0 <= config.order <= 4:
        fail(f'order must lie in [0, 4], got {config.order}', 'order')
    if not config.eps_min > 0:
        fail('eps_min must be positive', 'eps_min')
    if not 0 < config.eta_threshold <= 2:
        fail('eta_threshold must lie in (0, 2]', 'eta_threshold')
    if not 1e-14 < config.elliptic < 1e-4:
        fail(f'elliptic tolerance must lie in (1e-14, 1e-4), got {config.elliptic}', 'elliptic')
    if not 1e-12 < config.builder < 1e-6:
        fail(f'builder tolerance must lie in (1e-12, 1e-6), got {config.builder}', 'builder')
    if config.max_iter < 1:
        fail('max_iter must be at least 1', 'max_iter')
    if config.sobolev_order < 5:
        fail('sobolev_order must be at least 5', 'sobolev_order')
    if config.workers < 1:
        fail('workers must be at least 1', 'workers')
    return config


def load_config(path=None, text=None):
    """
    Parse and validate an experiment configuration.

    :param Path path: INI file; defaults apply to every missing key
    :param str text: INI contents, used instead of reading `path`
    :return ExperimentConfig:
    :raises ConfigError: on unreadable files, unknown sections or keys, unparsable or out-of-range values
    """
    if text is None:
        if path is None:
            return ExperimentConfig()
        try:
            text = Path(path).read_text()
        except OSError as e:
            msg = f'Cannot read configuration {path}: {e.strerror}'
            raise ConfigError(msg)

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path or '<string>'))
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError('Malformed configuration line', line=line)
    except configparser.Error as e:
        raise ConfigError(f'Malformed configuration: {e.message}', line=getattr(e, 'lineno', None))

    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f'Unknown section {section!r}', section=section, line=_line_of_section(text, section))
        for key, raw in parser.items(section):
            if key not in KEYS or KEYS[key][0] != section:
                raise ConfigError('Unknown key', section=section, key=key, line=_line_of(text, section, key))
            try:
                values[key] = KEYS[key][1](raw)
            except ValueError:
                msg = f'Cannot parse value {raw!r}'
                raise ConfigError(msg, section=section, key=key, line=_line_of(text, section, key))

    return _validate(ExperimentConfig(source=str(path or ''), **values), text)


def _line_of_section(text, section):
    for number, line in enumerate(text.splitlines(), start=1):
        if line.strip() == f'[{section}]':
            return number
    return None


def parse_kappa_list(value):
    try:
        return tuple(float(v) for v in value.split(',') if v.strip())
    except ValueError:
        raise ConfigError(f'Cannot parse kappa list {value!r}', section='eos', key='kappa_list')


def parse_resolution(value):
    match = re.fullmatch(r'\s*(\d+)\s*[xX]\s*(\d+)\s*', value)
    if not match:
        raise ConfigError(f'Resolution must look like NRxNT, got {value!r}', section='grid')
    return int(match.group(1)), int(match.group(2))


def apply_overrides(config, kappa=None, order=None, resolution=None, out=None):
    """
    Apply command-line overrides and validate the result.

    :param ExperimentConfig config:
    :param str kappa: comma separated kappa values; a single value also sets kappa
    :param int order: energy order
    :param str resolution: 'NRxNT'
    :param str out: output directory
    :return ExperimentConfig:
    """
    changes = {}
    if kappa:
        kappas = parse_kappa_list(kappa)
        changes['kappa_list'] = kappas
        if len(kappas) == 1:
            changes['kappa'] = kappas[0]
    if order is not None:
        changes['order'] = int(order)
    if resolution:
        changes['n_r'], changes['n_theta'] = parse_resolution(resolution)
    if out:
        changes['directory'] = str(out)
    return _validate(replace(config, **changes)) if changes else config


def resolve_out_dir(config, out=None):
    """
    Output directory: --out, then the FREESURFACE_OUT_DIR environment variable, then the config, then the default.

    :return Path:
    """
    if out:
        return Path(out)
    env = out_dir_from_env(default='')
    if str(env) not in ('', '.'):
        return env
    if config.directory:
        return Path(config.directory)
    return Path(DEFAULT_OUT_DIR)


def config_hash(config):
    """
    SHA-256 of the normalized effective configuration, excluding the output directory and worker count.

    :param ExperimentConfig config:
    :return str: hex digest
    """
    lines = []
    for key, value in sorted(asdict(config).items()):
        if key in _HASH_EXCLUDED:
            continue
        if isinstance(value, tuple):
            value = ','.join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f'{KEYS[key][0]}.{key}={value}')
    return hashlib.sha256('\n'.join(lines).encode('utf-8')).hexdigest()
