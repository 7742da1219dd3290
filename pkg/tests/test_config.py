from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from geometry import ReferenceDisk
from processing.config import (ExperimentConfig, load_config, apply_overrides, config_hash, resolve_out_dir,
                               parse_resolution)
from processing.presets import PRESETS, seed_velocity, linear_seed
from settings import CONFIG_DIR, DEFAULT_OUT_DIR, OUT_DIR_ENV
from utils.errors import ConfigError


def test_defaults():
    config = load_config()
    assert config == ExperimentConfig()
    assert config.resolution == (33, 64)
    assert config.time_step is None
    assert not config.incompressible


@pytest.mark.parametrize('name', ['quadrupole', 'rotation', 'sweep', 'zero'])
def test_shipped_configs_load(name):
    config = load_config(CONFIG_DIR / f'{name}.ini')
    assert config.source.endswith(f'{name}.ini')
    assert config.preset in PRESETS


def test_shipped_config_values():
    assert load_config(CONFIG_DIR / 'rotation.ini').incompressible
    zero = load_config(CONFIG_DIR / 'zero.ini')
    assert zero.resolution == (17, 32)
    assert zero.kappa == 1e4
    assert zero.T == 0.05
    assert load_config(CONFIG_DIR / 'sweep.ini').kappa_list == (1e2, 1e3, 1e4)


def test_values_are_parsed():
    config = load_config(text='[eos]\nkappa = inf\nkappa_list = 10, 1e3 inf\n[time]\ndt = 1e-3\n'
                              '[tolerances]\nneumann_phi = yes\n')
    assert np.isinf(config.kappa)
    assert config.incompressible
    assert config.kappa_list == (10.0, 1e3, np.inf)
    assert config.time_step == 1e-3
    assert config.neumann_phi is True
    assert load_config(text='[time]\nfilter_strength = 0\n').filter_strength == 0


def test_unknown_key_reports_its_line():
    with pytest.raises(ConfigError) as e:
        load_config(text='[grid]\nn_r = 17\nn_phi = 32\n')
    assert (e.value.section, e.value.key, e.value.line) == ('grid', 'n_phi', 3)


def test_unknown_section():
    with pytest.raises(ConfigError) as e:
        load_config(text='[seed]\npreset = zero\n\n[plots]\ndpi = 150\n')
    assert e.value.section == 'plots'
    assert e.value.line == 4


def test_key_in_the_wrong_section():
    with pytest.raises(ConfigError) as e:
        load_config(text='[time]\nkappa = 10\n')
    assert e.value.key == 'kappa'


def test_unparsable_value():
    with pytest.raises(ConfigError) as e:
        load_config(text='# comment\n[grid]\nn_r = many\n')
    assert (e.value.key, e.value.line) == ('n_r', 3)


@pytest.mark.parametrize('text, key', [
    ('[grid]\nn_r = 8\n', 'n_r'),
    ('[grid]\nn_theta = 33\n', 'n_theta'),
    ('[energy]\norder = 5\n', 'order'),
    ('[time]\ncfl = 2.5\n', 'cfl'),
    ('[time]\nfilter_strength = -1\n', 'filter_strength'),
    ('[tolerances]\nelliptic = 1e-3\n', 'elliptic'),
    ('[tolerances]\nbuilder = 1e-13\n', 'builder'),
    ('[tolerances]\nsobolev_order = 4\n', 'sobolev_order'),
    ('[output]\nworkers = 0\n', 'workers'),
    ('[eos]\nkappa = -1\n', 'kappa'),
    ('[eos]\nfamily = custom\n', 'table'),
    ('[seed]\npreset = vortex\n', 'preset'),
    ('[seed]\npreset = linear\ncoefficients = 1, 0, 0, 1\n', 'coefficients'),
])
def test_out_of_range_values(text, key):
    with pytest.raises(ConfigError) as e:
        load_config(text=text)
    assert e.value.key == key
    assert e.value.line is not None or key == 'table'


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / 'missing.ini')


def test_overrides():
    config = load_config()
    changed = apply_overrides(config, kappa='1e3', order=2, resolution='17x32', out='results')
    assert changed.kappa == 1e3
    assert changed.kappa_list == (1e3,)
    assert changed.order == 2
    assert changed.resolution == (17, 32)
    assert changed.directory == 'results'
    assert apply_overrides(config) is config

    several = apply_overrides(config, kappa='10,100')
    assert several.kappa == config.kappa
    assert several.kappa_list == (10.0, 100.0)

    with pytest.raises(ConfigError):
        apply_overrides(config, order=7)
    with pytest.raises(ConfigError):
        parse_resolution('17by32')
    assert parse_resolution(' 9X8 ') == (9, 8)


def test_hash_ignores_output_location():
    config = load_config()
    assert config_hash(config) == config_hash(apply_overrides(config, out='elsewhere'))
    assert config_hash(config) == config_hash(load_config(text='[output]\nworkers = 4\n'))
    assert config_hash(config) != config_hash(apply_overrides(config, kappa='1e3'))
    assert len(config_hash(config)) == 64


def test_resolve_out_dir(monkeypatch, tmp_path):
    config = load_config(text=f'[output]\ndirectory = {tmp_path / "from_config"}\n')
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    assert resolve_out_dir(ExperimentConfig()) == Path(DEFAULT_OUT_DIR)
    assert resolve_out_dir(config) == tmp_path / 'from_config'

    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path / 'from_env'))
    assert resolve_out_dir(config) == tmp_path / 'from_env'
    assert resolve_out_dir(config, out=tmp_path / 'flag') == tmp_path / 'flag'


def test_presets():
    disk = ReferenceDisk(9, 8)
    x1, x2 = disk.y
    assert_allclose(seed_velocity(disk, 'irrotational-quadrupole').data, np.stack([2 * x1, -2 * x2]))
    assert_allclose(seed_velocity(disk, 'rigid-rotation', omega=2.0).data, np.stack([-2 * x2, 2 * x1]))
    assert_allclose(seed_velocity(disk, 'zero').data, 0)
    assert_allclose(seed_velocity(disk, 'linear', coefficients=(1, 2, 3, -1)).data, np.stack([x1 + 2 * x2, 3 * x1 - x2]))
    with pytest.raises(ConfigError):
        seed_velocity(disk, 'vortex')
    with pytest.raises(ConfigError):
        linear_seed(disk, (1, 0, 0))
