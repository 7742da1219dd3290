"""
Tables of energies, diagnostics, iteration traces and sweeps, and the hashed CSV files they are written to.

Every CSV starts with a '# config_hash=<hex>' line. The body is written by pandas with a fixed float format so that
identical configurations give byte-identical files.
"""
from pathlib import Path

import pandas as pd

from IO.files import read_hash_line, get_all_data_files
from settings import CSV_FLOAT_FORMAT
from utils.errors import HashMismatch

__all__ = ['ENERGY_BASE_COLUMNS', 'DIAGNOSTIC_COLUMNS', 'energy_frame', 'diagnostics_frame', 'trace_frame',
           'monitors_frame', 'write_table', 'read_table', 'check_hashes', 'find_tables']

ENERGY_BASE_COLUMNS = ['Kr', 'Wr1', 'Wr1_sq', 'Er', 'Erstar', 'Ehat', 'Ehatstar', 'Etilde', 'Ephys', 'eps', 'calE',
                       'K', 'M']
DIAGNOSTIC_COLUMNS = ['t', 'continuity', 'curl', 'eps', 'calE']


def _component_columns(order):
    return [f'E{s}{r - s}' for r in range(order + 1) for s in range(r + 1)]


def energy_frame(run):
    """
    One row per sample of a run with the E_{s,k} components of every order up to the run's order.

    :param RunResult run:
    :return pd.DataFrame:
    """
    order = run.samples[0].order if len(run) else 0
    columns = ['t'] + _component_columns(order) + ENERGY_BASE_COLUMNS
    return pd.DataFrame([report.as_row() for report in run], columns=columns)


def diagnostics_frame(run):
    return pd.DataFrame(run.diagnostics, columns=DIAGNOSTIC_COLUMNS)


def trace_frame(trace):
    """
    Iteration trace of the data construction: norms m_k, differences M_k and contraction ratios per iteration.

    :param IterationTrace trace:
    :return pd.DataFrame:
    """
    df = pd.DataFrame(trace.rows)
    return df.astype({'nu': int}) if len(df) else df


def monitors_frame(rows):
    return pd.DataFrame(rows, columns=['monitor', 'case', 'value', 'reference', 'passed'])


def write_table(df, path, config_hash):
    """
    Write a DataFrame as CSV below a config hash line.

    :param pd.DataFrame df:
    :param Path path:
    :param str config_hash:
    :return Path:
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write(f'# config_hash={config_hash}\n')
        df.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return path


def read_table(path, expected_hash=None):
    """
    Read a hashed CSV.

    :param Path path:
    :param str expected_hash: refuse the file unless it carries this hash
    :return pd.DataFrame:
    :raises HashMismatch: if expected_hash is given and differs from the file's
    """
    found = read_hash_line(path)
    if expected_hash is not None and found != expected_hash:
        msg = f'{Path(path).name} was written with config hash {found}, expected {expected_hash}'
        raise HashMismatch(msg, expected=expected_hash, found=found)
    return pd.read_csv(path, skiprows=1 if found is not None else 0)


def find_tables(directory):
    """CSV tables in an output directory, sorted by name."""
    return sorted(get_all_data_files(directory, '.csv'), key=lambda p: p.name)


def check_hashes(paths, config_hash):
    """
    Refuse a set of tables unless all of them were written with config_hash.

    :param Sequence[Path] paths:
    :param str config_hash:
    :raises HashMismatch: on the first mismatching file
    """
    for path in paths:
        found = read_hash_line(path)
        if found != config_hash:
            msg = f'{Path(path).name} was written with config hash {found}, expected {config_hash}'
            raise HashMismatch(msg, expected=config_hash, found=found)
