"""
Explicit Runge-Kutta steps of the compressible and incompressible free-boundary systems in Lagrangian coordinates.

The compressible system is advanced in its wave formulation on (x, v, h, D_t h):
    D_t x = v,  D_t v = -dh,  D_t h = hdot,  e'(h) D_t hdot = Lap h + (d_i v^j)(d_j v^i) - e''(h) hdot^2,
with h = D_t h = 0 imposed on the boundary rows at every stage. The incompressible system solves the pressure Poisson
problem Lap p = -(d_i v^j)(d_j v^i), p = 0 on the boundary, on the geometry of every stage.

Both steps end by passing the map and the fields through the exponential filter of the reference disk.
"""
import numpy as np

from calculus.fields import Field
from calculus.operators import laplace_beltrami, div_curl
from elliptic.solvers import solve_dirichlet, DEFAULT_TOLERANCE
from geometry.disk import FILTER_STRENGTH
from geometry.cache import GeometryCache
from geometry.maps import LagrangianMap
from utils.errors import CflViolation, DegenerateEos

__all__ = ['RK4_WEIGHTS', 'cfl_limit', 'incompressible_time_step', 'compressible_rhs', 'step_compressible',
           'step_incompressible', 'clean_divergence', 'strain_contraction', 'CLEANING_FLOOR']

RK4_WEIGHTS = (1 / 6, 1 / 3, 1 / 3, 1 / 6)
CLEANING_FLOOR = 1e-8


def strain_contraction(v, lagrangian_map):
    """(d_i v^j)(d_j v^i) at every node."""
    grad = lagrangian_map.eulerian_derivative(v)
    return np.einsum('ij...,ji...->...', grad, grad)


def cfl_limit(disk, kappa, cfl=1.0):
    """Largest stable step cfl * dx_min / sqrt(kappa) of the explicit wave integrator."""
    return cfl * disk.min_spacing / np.sqrt(kappa)


def incompressible_time_step(disk, speed, cfl=1.0):
    """Advective step cfl * dx_min / max(1, max|u|)."""
    return cfl * disk.min_spacing / max(1.0, float(speed))


def _zero_boundary(a):
    a = a.copy()
    a[..., 0, :] = 0
    return a


def compressible_rhs(disk, eos, x, v, h, hdot):
    """
    Time derivatives of (x, v, h, hdot) for the compressible wave formulation.

    :return tuple: four arrays shaped like the inputs
    """
    lagrangian_map = LagrangianMap(disk, x)
    cache = GeometryCache(lagrangian_map)
    dv = -lagrangian_map.eulerian_derivative(h)
    lap = laplace_beltrami(Field(h), cache).data
    accel = (lap + strain_contraction(v, lagrangian_map) - eos.derivative(2, h) * hdot ** 2) / eos.derivative(1, h)
    return v, dv, hdot, _zero_boundary(accel)


def _check_step(state, dt, cfl):
    if state.eos.incompressible:
        msg = 'The incompressible member has e\' = 0; advance it with step_incompressible'
        raise DegenerateEos(msg)
    limit = cfl_limit(state.disk, state.eos.kappa, cfl)
    if abs(dt) > limit * (1 + 1e-12):
        msg = f'Time step {dt:.3e} exceeds the CFL limit {limit:.3e}'
        raise CflViolation(msg, dt=dt, limit=limit)


def step_compressible(state, dt, cfl=1.0, filter_strength=FILTER_STRENGTH):
    """
    One classical RK4 step of the compressible system followed by the spectral filter.

    :param SimState state:
    :param float dt: time step; negative steps integrate backwards
    :param float cfl: CFL constant of the stability check
    :param float filter_strength: damping exponent of the top modes; 0 disables the filter
    :return SimState:
    """
    _check_step(state, dt, cfl)
    disk, eos = state.disk, state.eos
    y0 = (state.map.positions, state.v.data, _zero_boundary(state.h.data), _zero_boundary(state.hdot.data))

    stages = []
    y = y0
    for c in (0.0, 0.5, 0.5, 1.0):
        if stages:
            y = tuple(a + c * dt * k for a, k in zip(y0, stages[-1]))
            y = (y[0], y[1], _zero_boundary(y[2]), _zero_boundary(y[3]))
        stages.append(compressible_rhs(disk, eos, *y))

    out = [a + dt * sum(w * k[i] for w, k in zip(RK4_WEIGHTS, stages)) for i, a in enumerate(y0)]
    x, v, h, hdot = (disk.smooth(a, filter_strength) for a in out)
    return state.replace(t=state.t + dt, map=LagrangianMap(disk, x), v=Field(v, 1), h=Field(_zero_boundary(h)),
                         hdot=Field(_zero_boundary(hdot)))


def _pressure(disk, x, v, tolerance):
    lagrangian_map = LagrangianMap(disk, x)
    cache = GeometryCache(lagrangian_map)
    p = solve_dirichlet(Field(-strain_contraction(v, lagrangian_map)), cache, tolerance=tolerance)
    return lagrangian_map, p


def step_incompressible(state, dt, tolerance=DEFAULT_TOLERANCE, filter_strength=FILTER_STRENGTH):
    """
    One RK4 step of the incompressible free-boundary system; the returned state carries h = p of its own geometry.

    :param SimState state: state with the incompressible member
    :param float dt: time step
    :param float tolerance: elliptic tolerance of the pressure solves
    :param float filter_strength: damping exponent of the top modes of x and v; 0 disables the filter
    :return SimState:
    """
    disk = state.disk
    y0 = (state.map.positions, state.v.data)
    stages = []
    y = y0
    for c in (0.0, 0.5, 0.5, 1.0):
        if stages:
            y = tuple(a + c * dt * k for a, k in zip(y0, stages[-1]))
        lagrangian_map, p = _pressure(disk, y[0], y[1], tolerance)
        stages.append((y[1], -lagrangian_map.eulerian_derivative(p.data)))

    x, v = (disk.smooth(a + dt * sum(w * k[i] for w, k in zip(RK4_WEIGHTS, stages)), filter_strength)
            for i, a in enumerate(y0))
    lagrangian_map, p = _pressure(disk, x, v, tolerance)
    return state.replace(t=state.t + dt, map=lagrangian_map, v=Field(v, 1), h=p, hdot=Field.zeros(disk))


def clean_divergence(state, tolerance=DEFAULT_TOLERANCE, floor=CLEANING_FLOOR):
    """
    Remove the gradient part of the velocity: v - d psi with Lap psi = div v and psi = 0 on the boundary.

    The projection is accurate to `tolerance` relative to div v or to `floor` relative to v, whichever is looser; a
    divergence already below floor |v| is left alone.

    :return SimState:
    """
    cache = state.geometry()
    div, _ = div_curl(state.v, cache)
    absolute = floor * float(np.linalg.norm(state.v.data))
    if float(np.linalg.norm(div.data[1:])) <= absolute:
        return state
    psi = solve_dirichlet(div, cache, tolerance=tolerance, absolute_tolerance=absolute)
    v = state.v.data - state.map.eulerian_derivative(psi.data)
    return state.replace(v=Field(v, 1))
