"""
Time integration drivers that sample energies and diagnostics along a trajectory.
"""
import time
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from calculus.fields import Field
from elliptic.solvers import solve_dirichlet, DEFAULT_TOLERANCE
from geometry.disk import FILTER_STRENGTH
from geometry.maps import LagrangianMap
from physics.energy import energy_total, taylor_and_apriori, EPS_MIN
from physics.eos import IncompressibleMember
from simulation.integrators import (step_compressible, step_incompressible, clean_divergence, cfl_limit,
                                    incompressible_time_step, strain_contraction)
from simulation.state import SimState
from utils.core import get_logger, make_class_iterable_on_attr

__all__ = ['RunResult', 'plan_steps', 'run_compressible', 'run_incompressible', 'incompressible_initial_state',
           'sample_diagnostics']


@make_class_iterable_on_attr('samples')
@dataclass
class RunResult:
    """
    Sampled output of one trajectory: energy reports, field snapshots and diagnostics at the sample times.

    Iterating over a RunResult yields its energy reports.
    """
    mode: str
    samples: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.samples)

    @property
    def times(self):
        return [s.t for s in self.snapshots]


def plan_steps(T, interval, limit, dt=None):
    """
    Choose a step that divides every sampling interval.

    :param float T: final time
    :param float interval: time between samples; T itself when not positive
    :param float limit: largest admissible step
    :param float dt: requested step; the stability limit when omitted
    :return tuple: (dt, steps per sample, number of samples after t = 0)
    """
    if T <= 0:
        return 0.0, 0, 0
    interval = T if interval is None or interval <= 0 or interval > T else interval
    n_samples = max(1, int(round(T / interval)))
    interval = T / n_samples
    target = limit if dt is None else min(dt, limit)
    per_sample = max(1, ceil(interval / target - 1e-9))
    return interval / per_sample, per_sample, n_samples


def sample_diagnostics(state, cache, monitors=None):
    """Continuity residual, curl norm and Taylor quantities of one state."""
    monitors = monitors if monitors is not None else taylor_and_apriori(state, cache)
    return {'t': state.t, 'continuity': state.continuity_residual(cache), 'curl': state.curl_norm(cache),
            'eps': monitors['eps'], 'calE': monitors['calE']}


def _record(result, state, order, eps_min, logger):
    cache = state.geometry()
    report = energy_total(state, state.eos, order, cache=cache, eps_min=eps_min, logger=logger)
    result.samples.append(report)
    result.snapshots.append(state)
    result.diagnostics.append(sample_diagnostics(state, cache, {'eps': report.eps, 'calE': report.calE}))


def run_compressible(state, T, dt=None, cfl=1.0, sample_every=None, order=0, eps_min=EPS_MIN,
                     filter_strength=FILTER_STRENGTH, logger=None):
    """
    Integrate the compressible system from `state` to time T.

    :param SimState state: initial state with a compressible equation of state
    :param float T: final time, >= 0
    :param float dt: requested step, capped by the CFL limit; automatic when omitted
    :param float cfl: CFL constant
    :param float sample_every: time between energy samples; only t = 0 and t = T when omitted
    :param int order: energy order r of the sampled reports
    :param float eps_min: smallest accepted Taylor sign for r >= 1
    :param float filter_strength: damping exponent of the spectral filter applied after every step; 0 disables it
    :param logger: optional logger
    :return RunResult:
    """
    logger = get_logger(logger)
    start = time.perf_counter()
    limit = cfl_limit(state.disk, state.eos.kappa, cfl)
    dt, per_sample, n_samples = plan_steps(T, sample_every, limit, dt)
    logger.info(f'compressible run: kappa={state.eos.kappa:g}, T={T:g}, dt={dt:.3e}, '
                f'{per_sample * n_samples} steps, order {order}')

    result = RunResult('compressible')
    _record(result, state, order, eps_min, logger)
    for sample in range(n_samples):
        for _ in range(per_sample):
            state = step_compressible(state, dt, cfl, filter_strength)
        _record(result, state, order, eps_min, logger)
        logger.debug(f't={state.t:.4f} E={result.samples[-1].E:.6e} Ephys={result.samples[-1].E_phys:.10e}')

    result.stats = {'dt': dt, 'steps': per_sample * n_samples, 'cfl_limit': limit,
                    'wall_time': time.perf_counter() - start}
    result.flags = {'sign_ok': bool(result.samples[0].eps > 0)}
    return result


def incompressible_initial_state(u0, disk, tolerance=DEFAULT_TOLERANCE):
    """
    State at t = 0 of the incompressible system: the seed velocity and its pressure on the reference disk.

    :param Field u0: divergence-free rank-1 field on the reference disk
    :return SimState:
    """
    lagrangian_map = LagrangianMap.identity(disk)
    cache = SimState.at_rest(disk, IncompressibleMember()).geometry()
    p = solve_dirichlet(Field(-strain_contraction(u0.data, lagrangian_map)), cache, tolerance=tolerance)
    return SimState(0.0, lagrangian_map, u0, p, Field.zeros(disk), IncompressibleMember())


def run_incompressible(u0, T, disk, dt=None, cfl=1.0, sample_every=None, projection_every=10,
                       tolerance=DEFAULT_TOLERANCE, filter_strength=FILTER_STRENGTH, logger=None):
    """
    Integrate the incompressible free-boundary system from the divergence-free seed u0.

    The run proceeds when the pressure violates the Taylor sign condition; the violation is logged and flagged.

    :param Field u0: seed velocity on the reference disk
    :param float T: final time
    :param ReferenceDisk disk:
    :param float dt: requested step; cfl dx_min / max(1, max|u0|) when omitted
    :param float cfl:
    :param float sample_every: time between samples
    :param int projection_every: steps between divergence cleanings; 0 disables cleaning
    :param float tolerance: elliptic tolerance
    :param float filter_strength: damping exponent of the spectral filter; 0 disables it
    :param logger: optional logger
    :return RunResult: order-0 energy reports with h = p and rho = 1
    """
    logger = get_logger(logger)
    start = time.perf_counter()
    state = incompressible_initial_state(u0, disk, tolerance)
    speed = float(np.sqrt(u0.pointwise_norm_squared()).max())
    limit = incompressible_time_step(disk, speed, cfl)
    dt, per_sample, n_samples = plan_steps(T, sample_every, limit, dt)

    monitors = taylor_and_apriori(state)
    sign_ok = monitors['eps'] > 0
    if not sign_ok:
        logger.warning(f'Taylor sign condition fails for the initial pressure (eps = {monitors["eps"]:.3e}); '
                       f'continuing with the run flagged')
    logger.info(f'incompressible run: T={T:g}, dt={dt:.3e}, {per_sample * n_samples} steps')

    result = RunResult('incompressible')
    _record(result, state, 0, EPS_MIN, logger)
    step = cleanings = 0
    for sample in range(n_samples):
        for _ in range(per_sample):
            state = step_incompressible(state, dt, tolerance, filter_strength)
            step += 1
            if projection_every and step % projection_every == 0:
                state = clean_divergence(state, tolerance)
                cleanings += 1
        _record(result, state, 0, EPS_MIN, logger)

    result.stats = {'dt': dt, 'steps': step, 'cleanings': cleanings, 'wall_time': time.perf_counter() - start}
    result.flags = {'sign_ok': bool(sign_ok)}
    return result
