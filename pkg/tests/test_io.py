import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from IO.db import DBConnection, RunRecord, OutputFile
from IO.files import (FieldBlock, write_container, read_container, read_hash_line, write_json, read_json,
                      get_all_data_files)
from processing.config import load_config, config_hash
from processing.runtime import Invocation
from utils.errors import ContainerError, NoConvergence, exit_code_for, HashMismatch, ConfigError

LOGGER = logging.getLogger('freesurface.tests')


def test_container_keeps_blocks(tmp_path):
    v = np.arange(2 * 3 * 4, dtype=float).reshape(2, 3, 4)
    h = np.linspace(0, 1, 12).reshape(3, 4)
    path = write_container(tmp_path / 'data.fsc', 'compatible-data', 'abc123',
                           [FieldBlock('v0', 1, v), FieldBlock('h0', 0, h, t=0.5)], kappa=repr(100.0))

    container = read_container(path)
    assert container.kind == 'compatible-data'
    assert container.config_hash == 'abc123'
    assert container.attributes == {'kappa': '100.0'}
    assert container.names() == ['v0', 'h0']
    assert container['v0'].rank == 1
    assert_allclose(container['v0'].data, v)
    assert container['h0'].t == 0.5
    assert container['v0'].t is None
    with pytest.raises(KeyError):
        container['h1']


def test_truncated_container(tmp_path):
    path = write_container(tmp_path / 'data.fsc', 'snapshots', 'abc', [FieldBlock('h0', 0, np.ones((3, 4)))])
    raw = path.read_bytes()
    path.write_bytes(raw[:-8])
    with pytest.raises(ContainerError):
        read_container(path)


def test_not_a_container(tmp_path):
    path = tmp_path / 'table.csv'
    path.write_text('t,E\n0,1\n')
    with pytest.raises(ContainerError):
        read_container(path)
    assert exit_code_for(ContainerError('')) == 3


def test_json_and_hash_lines(tmp_path):
    path = write_json(tmp_path / 'nested' / 'summary.json', {'b': np.float64(1.5), 'a': tmp_path})
    assert read_json(path) == {'a': str(tmp_path), 'b': 1.5}
    assert path.read_text().index('"a"') < path.read_text().index('"b"')

    table = tmp_path / 'energy.csv'
    table.write_text('# config_hash=deadbeef\nt,Er\n')
    assert read_hash_line(table) == 'deadbeef'
    plain = tmp_path / 'plain.csv'
    plain.write_text('t,Er\n')
    assert read_hash_line(plain) is None
    assert get_all_data_files(tmp_path, '.csv') == sorted([plain, table])


def test_ledger_records_runs_and_outputs(tmp_path):
    with DBConnection(directory=tmp_path) as session:
        record = RunRecord('run', 'abc', tmp_path)
        record.finish()
        record.outputs = [OutputFile(tmp_path / 'energy.csv', 'energy', 'abc')]
        session.add(record)
        session.commit()

    with DBConnection(directory=tmp_path) as session:
        stored = session.query(RunRecord).one()
        assert stored.status == 'ok'
        assert stored.wall_time >= 0
        assert [o.name for o in stored.outputs] == ['energy.csv']
        assert stored.outputs[0].kind == 'energy'


def test_invocation_writes_ledger_and_manifest(tmp_path):
    config = load_config()
    with Invocation(LOGGER, 'check', config, tmp_path) as invocation:
        out = invocation.path('monitors.json')
        out.write_text('{}')
        invocation.add(out, 'monitors')

    manifest = read_json(tmp_path / 'manifest.json')
    assert manifest['status'] == 'ok'
    assert manifest['config_hash'] == config_hash(config)
    assert manifest['outputs'] == ['monitors.json']
    assert 'numpy' in manifest['versions']

    with DBConnection(directory=tmp_path) as session:
        record = session.query(RunRecord).one()
        assert record.command == 'check'
        assert record.outputs[0].kind == 'monitors'


def test_invocation_records_failures(tmp_path):
    config = load_config()
    with pytest.raises(NoConvergence):
        with Invocation(LOGGER, 'build-data', config, tmp_path):
            raise NoConvergence('no luck', iterations=3, residual=1.0)

    assert read_json(tmp_path / 'manifest.json')['status'] == 'NoConvergence'
    with DBConnection(directory=tmp_path) as session:
        assert session.query(RunRecord).one().status == 'NoConvergence'


def test_exit_codes():
    assert exit_code_for(ConfigError('bad')) == 1
    assert exit_code_for(NoConvergence('slow')) == 2
    assert exit_code_for(HashMismatch('other')) == 3
    assert exit_code_for(FileNotFoundError()) == 3
    assert exit_code_for(RuntimeError()) == 2
