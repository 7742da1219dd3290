"""
JSON outputs: monitor rows of the check subcommand, the build summary of the data construction and the manifest
written by every subcommand.
"""
import platform
from datetime import datetime

import numpy as np
import pandas as pd
import scipy
import sqlalchemy
import sympy

from IO.files import write_json

__all__ = ['monitor_row', 'write_monitors', 'build_summary', 'write_build_summary', 'library_versions',
           'write_manifest']


def monitor_row(monitor, case, value, reference=None, passed=None):
    """
    One row of monitors.json.

    :param str monitor: e.g. 'poincare', 'hodge', 'trace', 'projection', 'commutator'
    :param str case: test case the monitor ran on
    :param float value: measured quantity
    :param float reference: expected value or bound, if any
    :param bool passed: outcome, None for report-only monitors
    :return dict:
    """
    return {'monitor': monitor, 'case': case, 'value': None if value is None else float(value),
            'reference': None if reference is None else float(reference),
            'passed': None if passed is None else bool(passed)}


def write_monitors(path, rows, config_hash):
    return write_json(path, {'config_hash': config_hash, 'monitors': list(rows)})


def build_summary(data, trace, report, eps_min):
    """
    Human-readable summary of a data construction.

    :param CompatibleData data:
    :param IterationTrace trace:
    :param EnergyReport report: energy report at t = 0, or None when it could not be formed
    :param float eps_min: admissible minimum of the Taylor sign
    :return dict:
    """
    eps = data.residuals['eps']
    return {
        'kappa': data.kappa,
        'iterations': data.iterations,
        'eps': eps,
        'eps_min': eps_min,
        'sign_condition': 'ok' if eps >= eps_min else 'SignConditionViolation',
        'Erstar0': None if report is None else report.E_star,
        'order': None if report is None else report.order,
        'contraction_ratios': [float(r) for r in trace.ratios],
        'contraction_ratio_max': max((float(r) for r in trace.ratios), default=None),
        'residuals': {k: float(v) for k, v in data.residuals.items()},
    }


def write_build_summary(path, summary, config_hash):
    return write_json(path, dict(summary, config_hash=config_hash))


def library_versions():
    return {'python': platform.python_version(), 'numpy': np.__version__, 'scipy': scipy.__version__,
            'sympy': sympy.__version__, 'pandas': pd.__version__, 'sqlalchemy': sqlalchemy.__version__}


def write_manifest(path, command, config_hash, started, outputs, status='ok'):
    """
    manifest.json of one invocation.

    :param Path path:
    :param str command: subcommand name
    :param str config_hash:
    :param datetime started: start of the invocation
    :param list outputs: produced files
    :param str status: 'ok' or the name of the error that ended the invocation
    :return Path:
    """
    finished = datetime.now()
    return write_json(path, {
        'command': command,
        'config_hash': config_hash,
        'status': status,
        'started': started.isoformat(timespec='seconds'),
        'finished': finished.isoformat(timespec='seconds'),
        'wall_time': (finished - started).total_seconds(),
        'versions': library_versions(),
        'outputs': sorted(str(p.name) for p in outputs),
    })
