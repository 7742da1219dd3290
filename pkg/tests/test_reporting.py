from types import SimpleNamespace

import numpy as np
import pandas as pd
import pytest

from IO.files import read_json
from calculus import Field
from physics import LinearFamily, energy_total
from plotting import plot_script_for, EnergyPlotScript, SweepPlotScript, TracePlotScript, DiagnosticsPlotScript
from reporting import (ENERGY_BASE_COLUMNS, energy_frame, diagnostics_frame, write_table, read_table, check_hashes,
                       find_tables, monitor_row, build_summary)
from simulation import SimState, RunResult
from settings import SCHEMA_FILE
from simulation.experiments import SWEEP_COLUMNS
from utils.errors import HashMismatch


@pytest.fixture
def run(disk, cache, bubble):
    state = SimState.initial(disk, LinearFamily(100.0), Field.zeros(disk, 1), bubble)
    report = energy_total(state, state.eos, 0, cache=cache)
    return RunResult('compressible', samples=[report, report], snapshots=[state, state],
                     diagnostics=[{'t': 0.0, 'continuity': 0.0, 'curl': 0.0, 'eps': 2.0, 'calE': 0.5}])


def test_energy_frame_columns(run):
    df = energy_frame(run)
    assert list(df.columns) == ['t', 'E00'] + ENERGY_BASE_COLUMNS
    assert len(df) == 2
    assert df['eps'].iloc[0] == pytest.approx(2.0)
    assert list(diagnostics_frame(run).columns) == ['t', 'continuity', 'curl', 'eps', 'calE']


def test_tables_carry_their_hash(tmp_path):
    df = pd.DataFrame({'t': [0.0, 0.1], 'Er': [1.0, 1.0 + 1e-9]})
    path = write_table(df, tmp_path / 'energy_r0.csv', 'abc')
    assert path.read_text().splitlines()[0] == '# config_hash=abc'

    back = read_table(path, expected_hash='abc')
    assert list(back.columns) == ['t', 'Er']
    assert back['Er'].iloc[1] == pytest.approx(1.0 + 1e-9, rel=1e-12)
    with pytest.raises(HashMismatch) as e:
        read_table(path, expected_hash='other')
    assert e.value.found == 'abc'


def test_identical_tables_are_identical_files(tmp_path):
    df = pd.DataFrame({'t': np.linspace(0, 1, 5), 'Er': np.exp(np.linspace(0, 1, 5))})
    first = write_table(df, tmp_path / 'a.csv', 'abc')
    second = write_table(df.copy(), tmp_path / 'b.csv', 'abc')
    assert first.read_bytes() == second.read_bytes()


def test_check_hashes(tmp_path):
    good = write_table(pd.DataFrame({'t': [0.0]}), tmp_path / 'energy.csv', 'abc')
    check_hashes([good], 'abc')
    bad = write_table(pd.DataFrame({'t': [0.0]}), tmp_path / 'sweep.csv', 'xyz')
    assert find_tables(tmp_path) == [good, bad]
    with pytest.raises(HashMismatch):
        check_hashes(find_tables(tmp_path), 'abc')


@pytest.mark.parametrize('name, cls', [
    ('energy_r2.csv', EnergyPlotScript),
    ('sweep.csv', SweepPlotScript),
    ('iteration_trace.csv', TracePlotScript),
    ('diagnostics.csv', DiagnosticsPlotScript),
])
def test_plot_scripts(tmp_path, name, cls):
    table = tmp_path / name
    script = plot_script_for(table)
    assert isinstance(script, cls)
    path = script.write()
    assert path.name == f'plot_{table.stem}.py'
    text = path.read_text()
    assert f"pd.read_csv('{name}', skiprows=1)" in text
    assert f"figure.savefig('{table.stem}.png', dpi=150)" in text
    compile(text, str(path), 'exec')


def test_tables_without_a_script(tmp_path):
    assert plot_script_for(tmp_path / 'uniform_energy.csv') is None


def test_monitor_rows():
    row = monitor_row('trace', 'constant@disk', np.float64(1.41), np.sqrt(3), np.bool_(True))
    assert row == {'monitor': 'trace', 'case': 'constant@disk', 'value': 1.41, 'reference': pytest.approx(np.sqrt(3)),
                   'passed': True}
    assert monitor_row('hodge', 'x', 2.0)['passed'] is None


def test_build_summary():
    data = SimpleNamespace(kappa=1e4, iterations=3, residuals={'eps': 3.99, 'boundary_h0': 0.0})
    trace = SimpleNamespace(ratios=[1e-4, 2e-4])
    report = SimpleNamespace(E_star=1.5, order=1)
    summary = build_summary(data, trace, report, 1e-6)
    assert summary['sign_condition'] == 'ok'
    assert summary['Erstar0'] == 1.5
    assert summary['contraction_ratios'] == [1e-4, 2e-4]
    assert summary['contraction_ratio_max'] == 2e-4

    data.residuals['eps'] = -1.0
    assert build_summary(data, trace, None, 1e-6)['sign_condition'] == 'SignConditionViolation'


def test_schema_documents_every_column(run):
    schema = read_json(SCHEMA_FILE)
    assert set(schema['energy.csv']) == {'t', 'E{s}{k}'} | set(ENERGY_BASE_COLUMNS)
    assert list(schema['diagnostics.csv']) == list(diagnostics_frame(run).columns)
    assert list(schema['sweep.csv']) == SWEEP_COLUMNS
