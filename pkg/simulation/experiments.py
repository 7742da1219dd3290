"""
Experiments assembled from runs: the incompressible-limit sweep over kappa, the transport check of the curl and the
uniform-in-kappa energy table of constructed data.
"""
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from calculus.fields import Field
from calculus.operators import div_curl, l2_norm
from construction.builder import build_initial_data, verify_uniform_energy
from elliptic.solvers import DEFAULT_TOLERANCE
from geometry.cache import GeometryCache
from geometry.disk import ReferenceDisk, FILTER_STRENGTH
from geometry.maps import LagrangianMap
from physics.eos import default_family
from simulation.runs import run_compressible, run_incompressible
from utils.core import get_logger
from utils.errors import FreeSurfaceError, InsufficientSnapshots

__all__ = ['SWEEP_COLUMNS', 'kappa_sweep', 'curl_transport_check', 'uniform_energy_table', 'compare_runs']

SWEEP_COLUMNS = ['kappa', 'dv', 'dh', 'dx', 'Estar_ratio_max', 'Ephys_drift', 'status']


def compare_runs(disk, run, reference):
    """
    Largest differences over the sample times between two runs sampled at the same times.

    Fields live on the common reference grid, so differences are taken node by node with reference-disk quadrature.

    :param ReferenceDisk disk:
    :param run: RunResult, or a list of (t, positions, v, h) tuples
    :param reference: same form as run
    :return dict: dv, dh, dx
    """
    ours, theirs = _snapshot_arrays(run), _snapshot_arrays(reference)
    if [round(s[0], 12) for s in ours] != [round(s[0], 12) for s in theirs]:
        msg = 'Runs must be sampled at the same times to be compared'
        raise ValueError(msg)

    def l2(a):
        return float(np.sqrt(disk.integrate(np.sum(a ** 2, axis=0))))

    dv = max(l2(a[2] - b[2]) for a, b in zip(ours, theirs))
    dh = max(l2((a[3] - b[3])[None]) for a, b in zip(ours, theirs))
    dx = max(float(np.abs(a[1] - b[1]).max()) for a, b in zip(ours, theirs))
    return {'dv': dv, 'dh': dh, 'dx': dx}


def _snapshot_arrays(run):
    if isinstance(run, list):
        return run
    return [(s.t, s.map.positions, s.v.data, s.h.data) for s in run.snapshots]


def _energy_columns(run):
    e_star = np.array([s.E_star for s in run.samples])
    e_phys = np.array([s.E_phys for s in run.samples])
    ratio = float(np.max(e_star / e_star[0])) if e_star[0] > 0 else np.nan
    drift = float(np.max(np.abs(e_phys - e_phys[0])) / max(abs(e_phys[0]), np.finfo(float).tiny))
    return {'Estar_ratio_max': ratio, 'Ephys_drift': drift}


def _sweep_entry(payload):
    """One row of the sweep; runs in a worker process."""
    kappa = payload['kappa']
    row = {'kappa': kappa}
    disk = ReferenceDisk(*payload['resolution'])
    try:
        if np.isinf(kappa):
            row.update({'dv': 0.0, 'dh': 0.0, 'dx': 0.0})
            row.update(payload['reference_energy'])
        else:
            cache = GeometryCache(LagrangianMap.identity(disk))
            u0 = Field(payload['u0'], 1)
            data, _ = build_initial_data(u0, kappa, cache, tol=payload['builder_tolerance'],
                                         max_iter=payload['max_iter'], sobolev_order=payload['sobolev_order'],
                                         elliptic_tolerance=payload['elliptic_tolerance'],
                                         neumann_phi=payload['neumann_phi'])
            run = run_compressible(data.state(cache), payload['T'], cfl=payload['cfl'],
                                   sample_every=payload['sample_every'], order=payload['order'],
                                   eps_min=payload['eps_min'], filter_strength=payload['filter_strength'])
            row.update(compare_runs(disk, run, payload['reference']))
            row.update(_energy_columns(run))
        row['status'] = 'ok'
    except FreeSurfaceError as e:
        row.update({'dv': np.nan, 'dh': np.nan, 'dx': np.nan, 'Estar_ratio_max': np.nan, 'Ephys_drift': np.nan,
                    'status': f'{e.__class__.__name__}: {e}'})
    return row


def kappa_sweep(u0, kappas, T, r, disk, cfl=1.0, sample_every=None, builder_tolerance=1e-10, max_iter=30,
                sobolev_order=5, elliptic_tolerance=DEFAULT_TOLERANCE, neumann_phi=False, eps_min=1e-6,
                projection_every=10, filter_strength=FILTER_STRENGTH, workers=1, logger=None):
    """
    Compare compressible runs from constructed data with the incompressible run of the same seed.

    :param Field u0: divergence-free seed on the reference disk
    :param list kappas: sound-speed parameters; inf compares the incompressible run with itself
    :param float T: final time
    :param int r: energy order tracked along each compressible run
    :param ReferenceDisk disk:
    :param int workers: processes running sweep entries concurrently
    :return pd.DataFrame: one row per kappa, in the order of `kappas`, columns SWEEP_COLUMNS
    """
    logger = get_logger(logger)
    reference_run = run_incompressible(u0, T, disk, cfl=cfl, sample_every=sample_every,
                                       projection_every=projection_every, tolerance=elliptic_tolerance,
                                       filter_strength=filter_strength, logger=logger)
    payload = {'resolution': (disk.n_r, disk.n_theta), 'u0': u0.data, 'T': T, 'order': r, 'cfl': cfl,
               'sample_every': sample_every, 'builder_tolerance': builder_tolerance, 'max_iter': max_iter,
               'sobolev_order': sobolev_order, 'elliptic_tolerance': elliptic_tolerance,
               'neumann_phi': neumann_phi, 'eps_min': eps_min, 'filter_strength': filter_strength,
               'reference': _snapshot_arrays(reference_run),
               'reference_energy': _energy_columns(reference_run)}
    payloads = [dict(payload, kappa=float(k)) for k in kappas]

    logger.info(f'kappa sweep over {list(kappas)} with {workers} worker(s)')
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_sweep_entry, payloads))
    else:
        rows = [_sweep_entry(p) for p in payloads]

    for row in rows:
        if row['status'] != 'ok':
            logger.warning(f'sweep entry kappa={row["kappa"]:g} failed: {row["status"]}')
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def curl_transport_check(run):
    """
    Residual of the curl transport equation D_t w_ij = -(d_i v^k) w_kj + (d_j v^k) w_ki along a run.

    The time derivative is a centered difference of neighbouring snapshots.

    :param RunResult run:
    :return list: one dict per interior snapshot with t, residual, curl and rhs norms
    """
    snapshots = run.snapshots
    if len(snapshots) < 3:
        msg = f'Curl transport needs at least 3 snapshots, got {len(snapshots)}'
        raise InsufficientSnapshots(msg, count=len(snapshots))

    curls = []
    for state in snapshots:
        _, curl = div_curl(state.v, state.geometry())
        curls.append(curl.data)

    series = []
    for j in range(1, len(snapshots) - 1):
        state = snapshots[j]
        cache = state.geometry()
        grad = state.map.eulerian_derivative(state.v.data)
        w = curls[j]
        rhs = -np.einsum('ik...,kj...->ij...', grad, w) + np.einsum('jk...,ki...->ij...', grad, w)
        dt_w = (curls[j + 1] - curls[j - 1]) / (snapshots[j + 1].t - snapshots[j - 1].t)
        series.append({'t': state.t, 'residual': l2_norm(Field(dt_w - rhs, 2), cache),
                       'curl': l2_norm(Field(w, 2), cache), 'rhs': l2_norm(Field(rhs, 2), cache)})
    return series


def uniform_energy_table(u0, kappas, r, cache, tol=1e-10, max_iter=30, eos_factory=default_family, logger=None):
    """
    E_r*(0) of the constructed data across kappa, with the Taylor sign of h_0 and the iteration count.

    :param callable eos_factory: maps kappa to the equation of state the data is built with
    :return pd.DataFrame: columns kappa, Estar, eps, iterations
    """
    rows = []
    for kappa in kappas:
        data, _ = build_initial_data(u0, kappa, cache, eos=eos_factory(kappa), tol=tol, max_iter=max_iter,
                                     logger=logger)
        report = verify_uniform_energy(data, r, cache, logger=logger)
        rows.append({'kappa': kappa, 'Estar': report.E_star, 'eps': report.eps, 'iterations': data.iterations})
    return pd.DataFrame(rows, columns=['kappa', 'Estar', 'eps', 'iterations'])
