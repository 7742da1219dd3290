import numpy as np
from scipy.special import j0

from calculus.commutators import commutator_residual
from calculus.fields import Field
from elliptic import (BESSEL_J0_ROOT, poincare_check, projection_formula_check, hodge_check, trace_check,
                      faber_krahn_reference)
from geometry.cache import GeometryCache
from geometry.maps import LagrangianMap
from physics.eos import verify_structural_conditions
from processing.runtime import Invocation, reference_geometry, eos_for
from processing.presets import linear_seed
from reporting import monitor_row, write_monitors
from simulation.state import SimState

__all__ = ['check', 'monitor_rows', 'COMMUTATOR_TOLERANCE', 'PROJECTION_TOLERANCE', 'POINCARE_TOLERANCE']

COMMUTATOR_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-8
POINCARE_TOLERANCE = 1e-6

COMMUTATOR_TEST_FIELD = 'x1**3 * x2 + x2**2 - x1'


def _ellipse(disk, aspect=1.2):
    return LagrangianMap.from_function(disk, lambda y1, y2: (aspect * y1, y2 / aspect))


def _poincare_rows(disk, cache):
    rr, _ = disk.mesh
    eigenfunction = Field(j0(BESSEL_J0_ROOT * rr))
    result = poincare_check(eigenfunction, cache)
    rows = [monitor_row('poincare', 'first-dirichlet-eigenfunction', result['ratio1'], 1 / BESSEL_J0_ROOT,
                        abs(result['ratio1'] - 1 / BESSEL_J0_ROOT) <= POINCARE_TOLERANCE)]

    bubble = poincare_check(Field(1 - rr ** 2), cache)
    rows.append(monitor_row('poincare', 'one-minus-r2', bubble['ratio1'], bubble['reference'], bubble['passed']))
    rows.append(monitor_row('faber-krahn', 'reference-disk', faber_krahn_reference(cache), 1 / BESSEL_J0_ROOT,
                            abs(faber_krahn_reference(cache) - 1 / BESSEL_J0_ROOT) <= POINCARE_TOLERANCE))
    return rows


def _projection_rows(disk, caches):
    rr, tt = disk.mesh
    cases = {'one-minus-r2': 1 - rr ** 2, 'one-minus-r2-cos': (1 - rr ** 2) * np.cos(tt)}
    rows = []
    for geometry_name, cache in caches.items():
        for name, values in cases.items():
            residual = projection_formula_check(Field(values), cache)
            rows.append(monitor_row('projection', f'{name}@{geometry_name}', residual, PROJECTION_TOLERANCE,
                                    residual <= PROJECTION_TOLERANCE))
    return rows


def _hodge_rows(disk, caches):
    u = linear_seed(disk, (2.0, 0.0, 0.0, -2.0))
    rows = []
    for geometry_name, cache in caches.items():
        for r in (0, 1):
            result = hodge_check(u, cache, r=r)
            rows.append(monitor_row('hodge', f'quadrupole-r{r}@{geometry_name}', result['constant'], None,
                                    np.isfinite(result['constant'])))
            rows.append(monitor_row('hodge-pointwise', f'quadrupole-r{r}@{geometry_name}', result['pointwise'], None,
                                    np.isfinite(result['pointwise'])))
    return rows


def _trace_rows(disk, caches):
    cases = {'constant': Field(np.ones(disk.shape)), 'x1': Field(disk.y[0].copy())}
    rows = []
    for geometry_name, cache in caches.items():
        for name, alpha in cases.items():
            result = trace_check(alpha, cache)
            rows.append(monitor_row('trace', f'{name}@{geometry_name}', result['ratio'], result['bound'],
                                    result['passed']))
    return rows


def _commutator_rows(disk, eos):
    lagrangian_map = _ellipse(disk)
    velocity = Field(np.stack([2 * lagrangian_map.positions[0], -2 * lagrangian_map.positions[1]]), 1)
    state = SimState.initial(disk, eos, velocity, Field.zeros(disk), lagrangian_map=lagrangian_map)
    cache = state.geometry()

    cases = [('Dt_grad', 1), ('Dt_gradr', 2), ('Dt_gradr', 3), ('Laplace_Dt', 0)]
    rows = []
    for kind, order in cases:
        result = commutator_residual(kind, order, state, COMMUTATOR_TEST_FIELD, cache=cache)
        rows.append(monitor_row('commutator', f'{kind}-r{order}', result['residual'], COMMUTATOR_TOLERANCE,
                                result['residual'] <= COMMUTATOR_TOLERANCE))
    return rows


def monitor_rows(config, logger=None):
    """
    Every monitor of the check subcommand on the configured grid.

    Elliptic monitors run on the reference disk and on an ellipse; commutators run on the ellipse with a linear
    velocity; the structural check samples the configured equation of state on [-1, 1].

    :param ExperimentConfig config:
    :return list: rows {monitor, case, value, reference, passed}
    """
    disk, cache = reference_geometry(config)
    caches = {'disk': cache, 'ellipse': GeometryCache(_ellipse(disk), eta_threshold=config.eta_threshold)}
    eos = eos_for(config)

    rows = _poincare_rows(disk, cache)
    rows += _projection_rows(disk, caches)
    rows += _hodge_rows(disk, caches)
    rows += _trace_rows(disk, caches)
    rows += _commutator_rows(disk, eos)

    if not eos.incompressible:
        structural = verify_structural_conditions(eos, config.c0, (-1.0, 1.0))
        rows.append(monitor_row('eos-structural', eos.name or eos.__class__.__name__, structural.worst_ratio, 1.0,
                                structural.passed))

    if logger is not None:
        for row in rows:
            if row['passed'] is False:
                logger.warning(f'monitor {row["monitor"]} failed on {row["case"]}: {row["value"]:.3e}')
    return rows


def check(logger, config, out_dir):
    """
    Run the inequality, identity and structural monitors and write monitors.json.

    Monitors are reports: a failing monitor is logged and recorded, not raised.

    :param logger: active logger
    :param ExperimentConfig config:
    :param Path out_dir:
    :return list: produced files
    """
    logger.info('Running check()')
    with Invocation(logger, 'check', config, out_dir) as invocation:
        rows = monitor_rows(config, logger)
        invocation.add(write_monitors(invocation.path('monitors.json'), rows, invocation.config_hash), 'monitors')
        logger.info(f'check: {sum(r["passed"] is True for r in rows)} of {len(rows)} monitors passed')
    return [path for path, _ in invocation.outputs]
