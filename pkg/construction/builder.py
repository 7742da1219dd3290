"""
Compatible initial data for the compressible system by successive approximation of coupled Poisson problems.

Starting from a divergence-free seed u0, the iteration solves

    Lap phi   = -h_1 / kappa            (phi = 0 on the boundary, or zero flux)
    v_0       = u0 + d phi
    Lap h_k   = h_(k+2) / kappa - F_k   (h_k = 0 on the boundary), k = 0..3, with h_4 = h_5 = 0

where F_k is the source of the k-th time-differentiated wave equation evaluated at t = 0, and the upper enthalpies
h_(k+2) are taken from the previous iterate. Iteration 0 drops every 1/kappa term.
"""
from dataclasses import dataclass, field

import numpy as np

from calculus.fields import Field
from calculus.norms import spectral_sobolev_norm, coefficient_scale
from calculus.operators import div_curl, laplace_beltrami, l2_norm
from elliptic.solvers import solve_dirichlet, solve_neumann, DEFAULT_TOLERANCE
from physics.energy import energy_total, boundary_taylor, EPS_MIN
from physics.eos import default_family
from physics.expansion import AtomTable, evaluate, builder_source, velocity_time_derivative, DerivedTimeFields
from simulation.integrators import strain_contraction
from simulation.state import SimState
from utils.core import get_logger
from utils.errors import UnsupportedFamily, NoContraction, NoConvergence

__all__ = ['COMPATIBILITY_ORDER', 'SOBOLEV_ORDER', 'DIVERGENCE_TOLERANCE', 'CompatibleData', 'IterationTrace',
           'incompressible_pressure', 'assemble_F', 'build_initial_data', 'verify_uniform_energy']

COMPATIBILITY_ORDER = 5
SOBOLEV_ORDER = 5
DIVERGENCE_TOLERANCE = 1e-8
FLOOR_FACTOR = 1e3
_SOLVED = 4


def incompressible_pressure(u0, cache, tolerance=DEFAULT_TOLERANCE, logger=None):
    """
    Pressure of the incompressible problem: Lap p0 = -(d_i u0^k)(d_k u0^i), p0 = 0 on the boundary.

    :param Field u0: divergence-free seed velocity
    :param GeometryCache cache: geometry at t = 0
    :param float tolerance: elliptic tolerance
    :return Field:
    """
    logger = get_logger(logger)
    div, _ = div_curl(u0, cache)
    divergence = l2_norm(div, cache)
    if divergence > DIVERGENCE_TOLERANCE:
        msg = f'Seed velocity must be divergence free, ||div u0|| = {divergence:.3e}'
        raise ValueError(msg)
    p0 = solve_dirichlet(Field(-strain_contraction(u0.data, cache.map)), cache, tolerance=tolerance, logger=logger)
    logger.debug(f'incompressible pressure: min(-N.dp0) = {boundary_taylor(p0, cache).min():.6g}')
    return p0


def assemble_F(k, v0, h_fields, cache):
    """
    Source F_k of the k-th time-differentiated wave equation at t = 0.

    :param int k: 0..3
    :param Field v0: velocity at t = 0
    :param list h_fields: h_0 .. h_(k-1) at least
    :param GeometryCache cache:
    :return Field:
    """
    if not 0 <= k <= 3:
        msg = f'Sources are assembled for k = 0..3, got {k}'
        raise ValueError(msg)
    return Field(evaluate(builder_source(k), AtomTable(cache, list(h_fields), v0)))


@dataclass
class IterationTrace:
    """Per-iteration norms m_k, differences M_k and contraction ratios of the data construction."""
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    @property
    def ratios(self):
        return [row['ratio'] for row in self.rows[1:]]

    @property
    def final(self):
        return self.rows[-1]


@dataclass
class CompatibleData:
    """Initial data satisfying the compatibility conditions up to order five."""
    u0: Field
    p0: Field
    v0: Field
    phi: Field
    h: list
    kappa: float
    iterations: int
    eos: object
    residuals: dict = field(default_factory=dict)

    def state(self, cache):
        """SimState at t = 0 with h = h_0 and D_t h = h_1 on the reference disk."""
        return SimState.initial(cache.disk, self.eos, self.v0, self.h[0], self.h[1], cache.map)

    def derived(self, r, cache):
        """Time derivatives h_0..h_(r+1) from the construction and D_t^k v from the momentum equation."""
        table = AtomTable(cache, self.h, self.v0)
        v = [self.v0] + [Field(np.stack([evaluate(velocity_time_derivative(k, j), table) for j in range(2)]), 1)
                         for k in range(1, r + 1)]
        return DerivedTimeFields(list(self.h[:r + 2]), v, r, provenance='compatible-data')


def _norms(cache, fields, v, s):
    return [spectral_sobolev_norm(cache.disk, f.data, s - k) for k, f in enumerate(fields)], \
        spectral_sobolev_norm(cache.disk, v.data, s)


def _differences(cache, new, old, v_new, v_old, s):
    disk = cache.disk
    diffs = []
    for k, (a, b) in enumerate(zip(new, old)):
        diffs.append(spectral_sobolev_norm(disk, a.data - b.data, s - k, scale=coefficient_scale(disk, a.data)))
    dv = spectral_sobolev_norm(disk, v_new.data - v_old.data, s, scale=coefficient_scale(disk, v_new.data))
    return diffs, dv


def _solve_enthalpies(v0, upper, inverse_kappa, cache, tolerance, logger):
    """h_0..h_3 from successive Dirichlet solves given the previous iterate's upper enthalpies."""
    h = []
    for k in range(_SOLVED):
        source = assemble_F(k, v0, h, cache)
        coupling = inverse_kappa * upper[k + 2].data if k + 2 < len(upper) else 0.0
        h.append(solve_dirichlet(Field(coupling - source.data), cache, tolerance=tolerance, logger=logger))
    return h


def build_initial_data(u0, kappa, cache, eos=None, tol=1e-10, max_iter=30, sobolev_order=SOBOLEV_ORDER,
                       elliptic_tolerance=DEFAULT_TOLERANCE, neumann_phi=False, logger=None):
    """
    Construct compatible data for the compressible system from an incompressible seed.

    :param Field u0: divergence-free seed velocity on the reference disk
    :param float kappa: sound-speed parameter; inf builds only the iteration-0 system
    :param GeometryCache cache: reference geometry at t = 0
    :param EosFamily eos: equation of state; the default member for kappa when omitted. Must have e'' = 0.
    :param float tol: stopping tolerance on the summed iterate differences, in (1e-12, 1e-6)
    :param int max_iter: iteration budget
    :param int sobolev_order: s of the H^(s-k) norms
    :param float elliptic_tolerance: tolerance of every Poisson solve
    :param bool neumann_phi: solve for phi with zero flux instead of phi = 0 on the boundary
    :param logger: optional logger
    :return tuple: (CompatibleData, IterationTrace)
    """
    logger = get_logger(logger)
    if not 1e-12 < tol < 1e-6:
        msg = f'Builder tolerance must lie in (1e-12, 1e-6), got {tol}'
        raise ValueError(msg)
    eos = eos if eos is not None else default_family(kappa)
    if not eos.is_linear:
        msg = f'Data construction needs e\'\'(h) = 0; {eos!r} is not supported'
        raise UnsupportedFamily(msg)

    disk = cache.disk
    inverse_kappa = eos.inverse_kappa
    zero = Field.zeros(disk)
    p0 = incompressible_pressure(u0, cache, elliptic_tolerance, logger)

    v0, phi = u0, zero
    h = _solve_enthalpies(v0, [], 0.0, cache, elliptic_tolerance, logger)
    trace = IterationTrace()
    m, mv = _norms(cache, h, v0, sobolev_order)
    m_star = sum(m) + mv
    trace.rows.append(_row(0, m, mv, m, mv, None))
    logger.info(f'data construction for kappa={kappa:g}: iteration 0, m*={m_star:.6e}')

    nu = 0
    if inverse_kappa > 0:
        previous_star = m_star
        bad = 0
        for nu in range(1, max_iter + 1):
            rhs = Field(-inverse_kappa * h[1].data)
            if neumann_phi:
                phi = solve_neumann(rhs, cache, tolerance=elliptic_tolerance, logger=logger)
            else:
                phi = solve_dirichlet(rhs, cache, tolerance=elliptic_tolerance, logger=logger)
            v_new = Field(u0.data + cache.map.eulerian_derivative(phi.data), 1)
            h_new = _solve_enthalpies(v_new, h, inverse_kappa, cache, elliptic_tolerance, logger)

            m, mv = _norms(cache, h_new, v_new, sobolev_order)
            diffs, dv = _differences(cache, h_new, h, v_new, v0, sobolev_order)
            star = sum(diffs) + dv
            m_star = sum(m) + mv
            ratio = star / previous_star if previous_star > 0 else 0.0
            trace.rows.append(_row(nu, m, mv, diffs, dv, ratio))
            logger.debug(f'iteration {nu}: M*={star:.3e}, ratio={ratio:.3e}')
            h, v0 = h_new, v_new

            threshold = tol * max(1.0, m_star)
            if star <= threshold:
                break
            bad = bad + 1 if ratio >= 1 else 0
            if bad >= 2:
                if star <= FLOOR_FACTOR * threshold:
                    logger.warning(f'Iteration stalled at M*={star:.3e}, within {FLOOR_FACTOR:g} x tolerance; '
                                   f'accepting the iterate')
                    break
                msg = f'Data construction does not contract for kappa={kappa:g}: ratios {trace.ratios[-2:]}'
                raise NoContraction(msg, ratios=trace.ratios)
            previous_star = star
        else:
            msg = f'Data construction did not converge in {max_iter} iterations (M*={star:.3e})'
            raise NoConvergence(msg, iterations=max_iter, residual=star)

    h = h + [zero, zero]
    data = CompatibleData(u0, p0, v0, phi, h, kappa, nu, eos)
    data.residuals = _residuals(data, cache, inverse_kappa)
    logger.info(f'data construction for kappa={kappa:g} finished after {nu} iterations')
    return data, trace


def _row(nu, m, mv, diffs, dv, ratio):
    row = {'nu': nu}
    row.update({f'm{k}': value for k, value in enumerate(m)})
    row.update({'mv': mv, 'mstar': sum(m) + mv})
    row.update({f'M{k}': value for k, value in enumerate(diffs)})
    row.update({'Mv': dv, 'Mstar': sum(diffs) + dv, 'ratio': np.nan if ratio is None else ratio})
    return row


def _residuals(data, cache, inverse_kappa):
    """Boundary values of h_0..h_5 and relative residuals of each Poisson equation."""
    residuals = {f'boundary_h{k}': float(np.abs(f.data[0]).max()) for k, f in enumerate(data.h)}
    for k in range(_SOLVED):
        source = assemble_F(k, data.v0, data.h[:k], cache)
        target = inverse_kappa * data.h[k + 2].data - source.data
        lap = laplace_beltrami(data.h[k], cache).data
        scale = max(1.0, float(np.abs(target).max()))
        residuals[f'pde_h{k}'] = float(np.abs(lap - target)[1:].max() / scale)
    div, _ = div_curl(data.v0, cache)
    residuals['continuity'] = l2_norm(Field(div.data + inverse_kappa * data.h[1].data), cache)
    residuals['eps'] = float(boundary_taylor(data.h[0], cache).min())
    return residuals


def verify_uniform_energy(data, r, cache, eos=None, eps_min=EPS_MIN, logger=None):
    """
    Energy report of order r of the constructed data at t = 0.

    :param CompatibleData data:
    :param int r: energy order
    :param GeometryCache cache: reference geometry at t = 0
    :param EosFamily eos: defaults to the family the data was built with
    :return EnergyReport:
    """
    eos = eos if eos is not None else data.eos
    state = data.state(cache).replace(eos=eos)
    return energy_total(state, eos, r, derived=data.derived(r, cache), cache=cache, eps_min=eps_min, logger=logger)
