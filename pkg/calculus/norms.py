"""
Norms on the reference disk: coefficient-space Sobolev norms for iterations and resolution checks, and the mixed
space-time norms built from derived time-derivative fields.
"""
from dataclasses import dataclass, asdict

import numpy as np

from calculus.fields import Field
from calculus.operators import repeated_gradient, l2_norm, boundary_l2_norm
from utils.errors import MissingDerivedFields

__all__ = ['CHOP', 'coefficient_scale', 'spectral_sobolev_norm', 'tail_fraction', 'MixedNormReport',
           'mixed_norms']

CHOP = 1e-13


def _mode_multiplicity(disk):
    mult = np.full(disk.modes.shape, 2.0)
    mult[0] = 1
    mult[-1] = 1
    return mult


def coefficient_scale(disk, data):
    """Largest coefficient magnitude of grid data (all tensor components)."""
    return float(np.abs(disk.coefficients(np.asarray(data))).max())


def spectral_sobolev_norm(disk, data, order, scale=None, chop=CHOP):
    """
    Discrete H^order norm, sqrt(sum (1 + k^2 + m^2)^order |c_km|^2), over Chebyshev degree k and angular mode m.

    Coefficients below chop * scale are discarded first so that rounding noise in high modes, which repeated
    collocation derivatives would amplify, does not enter the norm.

    :param ReferenceDisk disk:
    :param np.ndarray data: grid data, any leading tensor axes
    :param int order: Sobolev order
    :param float scale: reference coefficient magnitude for the chop; the data's own largest coefficient if omitted
    :param float chop: relative truncation level
    :return float:
    """
    mag = np.abs(disk.coefficients(np.asarray(data)))
    ref = mag.max() if scale is None else scale
    mag = np.where(mag < chop * ref, 0.0, mag)
    weight = (1.0 + disk.wavenumber_squared) ** order * _mode_multiplicity(disk)
    return float(np.sqrt(np.sum(weight * mag ** 2)))


def tail_fraction(disk, data):
    """
    Share of the coefficient norm held by the upper third of the Chebyshev or Fourier spectrum.

    :return tuple: (fraction, total norm)
    """
    mag2 = np.abs(disk.coefficients(np.asarray(data))) ** 2 * _mode_multiplicity(disk)
    total = float(np.sqrt(mag2.sum()))
    if total == 0:
        return 0.0, 0.0
    tail = float(np.sqrt(mag2[..., disk.upper_third].sum()))
    return tail / total, total


@dataclass(frozen=True)
class MixedNormReport:
    """Mixed space-time norms of order r of a state and its derived time derivatives."""
    order: int
    v_r0: float
    h_r: float
    h_r0: float
    h_boundary: float
    dt_h_r: float
    h_weak: float

    def as_dict(self):
        return asdict(self)


def _sum_r0(fields, r, cache, shift=0):
    total = 0.0
    for k in range(r):
        total += l2_norm(repeated_gradient(fields[k + shift], cache, r - k), cache)
    return total


def mixed_norms(state, r, derived, cache=None):
    """
    Mixed Sobolev norms of order r.

    ||u||_{r,0} = sum_{s+k=r, k<r} ||d^s D_t^k u||, ||h||_r = ||h||_{r,0} + ||sqrt(e') D_t^r h||,
    <<h>>_r = sum_{s+k=r} ||d^s D_t^k h||_{L2(boundary)}, and ||D_t h||_r with D_t h in place of h.
    The weak norm sums ||d^j D_t^k h|| over k < r and j <= r - k.

    :param SimState state: current state, provides the map and the equation of state
    :param int r: order
    :param DerivedTimeFields derived: time derivatives h_0..h_{r+1}, v_0..v_{r-1} at least
    :param GeometryCache cache: geometry of the state, rebuilt when omitted
    :return MixedNormReport:
    """
    if derived is None or len(derived.h) < r + 2 or len(derived.v) < max(r, 1):
        msg = f'Mixed norms of order {r} need h_0..h_{r + 1} and v_0..v_{max(r - 1, 0)}'
        raise MissingDerivedFields(msg)
    cache = cache if cache is not None else state.geometry()

    h = derived.h
    e1 = state.eos.derivative(1, h[0].data)
    root_e1 = Field(np.sqrt(np.maximum(e1, 0)) * np.ones(cache.disk.shape))

    v_r0 = _sum_r0(derived.v, r, cache)
    h_r0 = _sum_r0(h, r, cache)
    h_r = h_r0 + l2_norm(root_e1 * h[r], cache)
    dt_h_r = _sum_r0(h, r, cache, shift=1) + l2_norm(root_e1 * h[r + 1], cache)
    h_boundary = sum(boundary_l2_norm(repeated_gradient(h[k], cache, r - k), cache) for k in range(r + 1))
    h_weak = sum(l2_norm(repeated_gradient(h[k], cache, j), cache) for k in range(r) for j in range(r - k + 1))
    return MixedNormReport(r, v_r0, h_r, h_r0, h_boundary, dt_h_r, h_weak)
