"""
Higher-order energies of the free-surface system and the a priori monitors that accompany them.
"""
from dataclasses import dataclass, field

import numpy as np

from calculus.fields import Field, as_array
from calculus.operators import (repeated_gradient, div_curl, boundary_project, l2_norm, laplace_beltrami,
                                weight_slots)
from physics.expansion import derive_time_fields
from utils.core import get_logger
from utils.errors import RankMismatch, SignConditionViolation, MissingDerivedFields

__all__ = ['EPS_MIN', 'q_inner', 'EnergyReport', 'energy_total', 'taylor_and_apriori', 'physical_energy',
           'boundary_taylor']

EPS_MIN = 1e-6


def q_inner(alpha, beta, cache, slots=None):
    """
    Q(alpha, beta) = q^{i1 j1} ... q^{ir jr} alpha_{i1..ir} beta_{j1..jr} at every node.

    :param Field alpha:
    :param Field beta: same rank as alpha
    :param GeometryCache cache: provides q^{ij} = delta^{ij} - eta^2 N^i N^j
    :param int slots: number of leading index slots weighted by q; the rest are contracted with delta. All by default.
    :return Field: scalar
    """
    if alpha.rank != beta.rank:
        msg = f'Q-form needs equal ranks, got {alpha.rank} and {beta.rank}'
        raise RankMismatch(msg)
    slots = alpha.rank if slots is None else slots
    weighted = weight_slots(alpha.data, cache.q, slots)
    return Field(np.sum(weighted * beta.data, axis=tuple(range(alpha.rank))))


def boundary_taylor(h, cache):
    """-N^i d_i h at every boundary node."""
    grad = cache.map.eulerian_derivative(as_array(h))[:, 0, :]
    return -np.sum(cache.normal * grad, axis=0)


def _max_pointwise(f):
    data = as_array(f)
    rank = f.rank if isinstance(f, Field) else 0
    return float(np.sqrt(np.sum(data ** 2, axis=tuple(range(rank)))).max())


def taylor_and_apriori(state, cache=None, derived=None):
    """
    Taylor sign quantities and the L-infinity monitors of a state.

    eps = min over the boundary of -N.dh, calE = 1/eps (inf when eps <= 0), K = max|theta| + 1/l0 and M the largest of
    |dv|, |dh|, |d^2 h|, |d D_t h|, |D_t h|, |D_t^2 h| and |rho|.

    :param SimState state:
    :param GeometryCache cache: geometry of the state, rebuilt when omitted
    :param DerivedTimeFields derived: supplies D_t^2 h when present; otherwise it comes from the wave equation
    :return dict:
    """
    cache = cache if cache is not None else state.geometry()
    eos = state.eos
    taylor = boundary_taylor(state.h, cache)
    eps = float(taylor.min())
    cal_e = 1 / eps if eps > 0 else np.inf

    grad_v = repeated_gradient(state.v, cache, 1)
    grad_h = repeated_gradient(state.h, cache, 1)
    hess_h = repeated_gradient(grad_h, cache, 1)
    grad_hdot = repeated_gradient(state.hdot, cache, 1)
    candidates = [_max_pointwise(grad_v), _max_pointwise(grad_h), _max_pointwise(hess_h), _max_pointwise(grad_hdot),
                  _max_pointwise(state.hdot), _max_pointwise(eos.density(state.h.data))]

    if derived is not None and len(derived.h) > 2:
        candidates.append(_max_pointwise(derived.h[2]))
    elif not eos.incompressible:
        strain = np.einsum('ij...,ji...->...', grad_v.data, grad_v.data)
        rhs = laplace_beltrami(state.h, cache).data + strain - eos.derivative(2, state.h.data) * state.hdot.data ** 2
        candidates.append(_max_pointwise(rhs / eos.derivative(1, state.h.data)))

    return {'eps': eps, 'calE': cal_e, 'K': cache.apriori_k, 'M': max(candidates), 'sign_ok': eps > 0}


def physical_energy(state, cache=None):
    """E0 = 1/2 int rho |v|^2 + int rho Q(rho) over the physical domain."""
    cache = cache if cache is not None else state.geometry()
    h = state.h.data
    rho = state.eos.density(h)
    kinetic = 0.5 * cache.integrate(rho * state.v.pointwise_norm_squared())
    return float(kinetic + cache.integrate(state.eos.internal_energy_density(h)))


@dataclass
class EnergyReport:
    """Energies of order r at one time, together with the Taylor quantities and a priori monitors."""
    t: float
    order: int
    components: dict
    K_r: float
    W: float
    W_squared: float
    W_tilde: float
    E: float
    E_star: float
    E_hat: float
    E_hat_star: float
    E_tilde: float
    E_phys: float
    eps: float
    calE: float
    K: float
    M: float
    per_order: dict = field(default_factory=dict)

    def as_row(self):
        """Flat mapping with the stable column names of the energy table."""
        row = {'t': self.t}
        row.update(self.components)
        row.update({'Kr': self.K_r, 'Wr1': self.W, 'Wr1_sq': self.W_squared, 'Er': self.E, 'Erstar': self.E_star,
                    'Ehat': self.E_hat, 'Ehatstar': self.E_hat_star, 'Etilde': self.E_tilde, 'Ephys': self.E_phys,
                    'eps': self.eps, 'calE': self.calE, 'K': self.K, 'M': self.M})
        return row


def _component(derived, s, k, rho, e1, nu, cache, with_boundary):
    """E_{s,k}: interior velocity and enthalpy pieces plus the nu-weighted tangential boundary piece."""
    dv = repeated_gradient(derived.v[k], cache, s)
    dh = repeated_gradient(derived.h[k], cache, s)
    velocity = 0.5 * cache.integrate(rho * q_inner(dv, dv, cache, slots=s).data)
    enthalpy = 0.5 * cache.integrate(rho * e1 * q_inner(dh, dh, cache).data)
    boundary = 0.0
    if with_boundary:
        tangential = boundary_project(dh, cache).pointwise_norm_squared()
        boundary = 0.5 * cache.integrate_boundary(rho[0] * tangential * nu)
    return float(velocity + enthalpy + boundary)


def _order_energy(r, derived, rho, e1, nu, cache):
    components = {(s, r - s): _component(derived, s, r - s, rho, e1, nu, cache, r >= 1) for s in range(r + 1)}
    if r == 0:
        k_r = 0.0
    else:
        _, curl = div_curl(derived.v[0], cache)
        k_r = float(cache.integrate(rho * repeated_gradient(curl, cache, r - 1).pointwise_norm_squared()))

    root = Field(np.sqrt(np.maximum(e1, 0)))
    h_top, h_r = derived.h[r + 1], derived.h[r]
    grad_h_r = repeated_gradient(h_r, cache, 1)
    w = 0.5 * l2_norm(root * h_top, cache) + 0.5 * l2_norm(grad_h_r, cache)
    w_tilde = 0.5 * l2_norm(Field(e1) * h_top, cache) + 0.5 * l2_norm(root * grad_h_r, cache)

    interior = sum(components.values())
    hat = sum(value for (s, k), value in components.items() if k <= r - 2)
    return {'components': components, 'K_r': k_r, 'W': w, 'W_tilde': w_tilde, 'E': interior + k_r + w ** 2,
            'E_hat': hat + k_r + w ** 2, 'E_tilde': interior + k_r + w_tilde}


def energy_total(state, eos, r, derived=None, cache=None, eps_min=EPS_MIN, logger=None):
    """
    Energy report of order r.

    E_r = sum_{s+k=r} E_{s,k} + K_r + W_{r+1}^2, with E_r* accumulated over orders 0..r. Orders r >= 1 weight the
    boundary terms by nu = 1/(-N.dh) and therefore need the Taylor sign condition eps >= eps_min.

    :param SimState state:
    :param EosFamily eos: equation of state used for rho and e'
    :param int r: order, 0 <= r <= 4
    :param DerivedTimeFields derived: time derivatives to order r; computed from the state when omitted
    :param GeometryCache cache: geometry of the state, rebuilt when omitted
    :param float eps_min: smallest accepted Taylor sign
    :param logger: optional logger
    :return EnergyReport:
    """
    logger = get_logger(logger)
    cache = cache if cache is not None else state.geometry()
    if derived is None:
        derived = derive_time_fields(state, eos, r, cache=cache, logger=logger)
    if len(derived.h) < r + 2 or len(derived.v) < r + 1:
        msg = f'Energy of order {r} needs h_0..h_{r + 1} and v_0..v_{r}'
        raise MissingDerivedFields(msg)

    monitors = taylor_and_apriori(state, cache, derived)
    eps = monitors['eps']
    if r >= 1 and eps < eps_min:
        msg = f'Taylor sign condition fails: min(-N.dh) = {eps:.3e} < {eps_min:.1e}'
        raise SignConditionViolation(msg, eps=eps)

    h = state.h.data
    rho = eos.density(h)
    e1 = eos.derivative(1, h) * np.ones(cache.disk.shape)
    with np.errstate(divide='ignore'):
        nu = 1 / boundary_taylor(state.h, cache)

    per_order = {r_: _order_energy(r_, derived, rho, e1, nu, cache) for r_ in range(r + 1)}
    top = per_order[r]
    components = {f'E{s}{k}': value for r_ in per_order for (s, k), value in per_order[r_]['components'].items()}
    logger.debug(f'energy of order {r} at t={state.t:.6g}: E={top["E"]:.6e}')

    return EnergyReport(
        t=float(state.t), order=r, components=components, K_r=top['K_r'], W=top['W'], W_squared=top['W'] ** 2,
        W_tilde=top['W_tilde'], E=top['E'], E_star=sum(p['E'] for p in per_order.values()), E_hat=top['E_hat'],
        E_hat_star=sum(p['E_hat'] for p in per_order.values()), E_tilde=top['E_tilde'],
        E_phys=physical_energy(state, cache), eps=eps, calE=monitors['calE'], K=monitors['K'], M=monitors['M'],
        per_order={r_: p['E'] for r_, p in per_order.items()}
    )
