"""
Moving-boundary geometry derived from a Lagrangian map: metric, boundary normals, second fundamental form, the
interior extension of the normal, and the injectivity-radius estimates that size the boundary collar.

Boundary quantities are indexed by the n_theta boundary nodes; interior quantities by the full (n_r, n_theta) grid.
Collar quantities (distance to the boundary, cutoff, q^{ij}) are computed on first access only.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from calculus.fields import as_array

__all__ = ['BoundaryCurve', 'GeometryCache', 'MaterialDerivatives', 'build_geometry', 'geometry_material_derivatives',
           'injectivity_radius', 'cutoff_profile']

_NEWTON_STEPS = 6


def cutoff_profile(s):
    """
    C^2 cutoff: 1 for s <= 1/4, 0 for s >= 1/2, quintic smoothstep in between.

    :param np.ndarray s: distance to the boundary in units of the collar width d0
    :return np.ndarray:
    """
    t = np.clip((np.asarray(s) - 0.25) / 0.25, 0, 1)
    return 1 - t ** 3 * (10 - 15 * t + 6 * t ** 2)


class BoundaryCurve:
    """Trigonometric interpolant of the boundary node positions, parametrized by the reference angle."""

    def __init__(self, points):
        """
        :param np.ndarray points: boundary positions shaped (2, n_theta), ordered by increasing reference angle
        """
        self.points = np.asarray(points, dtype=float)
        self.n_theta = self.points.shape[-1]
        self.coeffs = np.fft.rfft(self.points, axis=-1) / self.n_theta
        self.modes = np.arange(self.coeffs.shape[-1])
        self.weights = np.full(self.modes.shape, 2.0)
        self.weights[0] = 1
        self.weights[-1] = 1

    def evaluate(self, theta, derivative=0):
        """
        Position or its angular derivative at arbitrary angles.

        :param np.ndarray theta: angles, any shape
        :param int derivative: order of the angular derivative
        :return np.ndarray: shape (2,) + theta.shape
        """
        theta = np.asarray(theta, dtype=float)
        factor = (1j * self.modes) ** derivative * self.weights
        if derivative % 2:
            factor[-1] = 0
        phase = np.exp(1j * np.multiply.outer(theta, self.modes))
        return np.real(np.einsum('cm,...m->c...', self.coeffs * factor, phase))

    def unit_normal(self, theta):
        """Outward unit normal (tangent rotated clockwise) at arbitrary angles."""
        d = self.evaluate(theta, 1)
        speed = np.hypot(d[0], d[1])
        return np.stack([d[1], -d[0]]) / speed


class GeometryCache:
    """
    Geometric quantities of one configuration of the moving domain.

    Lagrangian-index tensors carry (a, b) slots, Eulerian-index tensors carry (i, j) slots. Boundary tensors have a
    trailing n_theta axis, interior tensors trailing (n_r, n_theta).
    """

    def __init__(self, lagrangian_map, eta_threshold=1.0):
        """
        :param LagrangianMap lagrangian_map: the flow map at the current time
        :param float eta_threshold: normal-turning threshold used by the injectivity-radius estimate
        """
        self.map = lagrangian_map
        self.disk = lagrangian_map.disk
        self.eta_threshold = eta_threshold

        a = lagrangian_map.jacobian
        ainv = lagrangian_map.inverse_jacobian

        self.metric = np.einsum('iaxy,ibxy->abxy', a, a)
        self.inverse_metric = np.einsum('aixy,bixy->abxy', ainv, ainv)
        self.volume_factor = lagrangian_map.det

        self.boundary = BoundaryCurve(lagrangian_map.positions[:, 0, :])
        theta = self.disk.theta
        d1 = self.boundary.evaluate(theta, 1)
        d2 = self.boundary.evaluate(theta, 2)
        self.speed = np.hypot(d1[0], d1[1])
        self.tangent = d1 / self.speed
        self.normal = np.stack([self.tangent[1], -self.tangent[0]])
        self.curvature = (d1[0] * d2[1] - d1[1] * d2[0]) / self.speed ** 3

        eye = np.eye(2)[:, :, None]
        self.projection_eulerian = eye - np.einsum('it,jt->ijt', self.normal, self.normal)
        self.second_fundamental_form_eulerian = self.curvature * np.einsum('it,jt->ijt', self.tangent, self.tangent)

        a_b = a[..., 0, :]
        ainv_b = ainv[..., 0, :]
        self.conormal = np.einsum('iat,it->at', a_b, self.normal)
        self.normal_up = np.einsum('ait,it->at', ainv_b, self.normal)
        self.projection = eye - np.einsum('at,bt->abt', self.conormal, self.normal_up)
        self.second_fundamental_form = np.einsum('iat,jbt,ijt->abt', a_b, a_b, self.second_fundamental_form_eulerian)
        self.mean_curvature = np.einsum('abt,abt->t', self.inverse_metric[..., 0, :], self.second_fundamental_form)

        self.arc_weights = self.speed * self.disk.arc_weights
        self.area_weights = lagrangian_map.area_weights

    def __repr__(self):
        return f'{self.__class__.__name__}({self.map!r}, eta_threshold={self.eta_threshold})'

    @property
    def volume(self):
        return float(self.disk.integrate(np.ones(self.disk.shape), self.area_weights))

    @property
    def max_curvature(self):
        return float(np.abs(self.curvature).max())

    def integrate(self, f):
        """Integral over the physical domain of grid data (trailing axes n_r, n_theta)."""
        return self.disk.integrate(f, self.area_weights)

    def integrate_boundary(self, f):
        """Integral over the physical boundary of boundary data (trailing axis n_theta)."""
        return self.disk.integrate_boundary(f, self.arc_weights)

    # ----------------- collar ----------------- #

    @cached_property
    def injectivity(self):
        return injectivity_radius(self, self.eta_threshold)

    @property
    def l0(self):
        return self.injectivity['l0']

    @property
    def l1(self):
        return self.injectivity['l1']

    @property
    def collar_width(self):
        """Cutoff scale d0 = l0 / 4."""
        return self.l0 / 4

    @property
    def apriori_k(self):
        """Geometry monitor K = max|theta| + 1/l0."""
        return self.max_curvature + 1 / self.l0

    @cached_property
    def _foot_points(self):
        """Distance to the boundary and the boundary normal at the nearest boundary point, for every node."""
        curve = self.boundary
        oversample = max(2, 512 // self.disk.n_theta)
        fine = 2 * np.pi * np.arange(oversample * curve.n_theta) / (oversample * curve.n_theta)
        fine_points = curve.evaluate(fine)

        x = self.map.positions.reshape(2, -1)
        dist2 = np.sum((x[:, :, None] - fine_points[:, None, :]) ** 2, axis=0)
        nearest = np.argmin(dist2, axis=1)
        t = fine[nearest]
        coarse = np.sqrt(dist2[np.arange(x.shape[1]), nearest])
        max_step = 2 * np.pi / fine.size

        for _ in range(_NEWTON_STEPS):
            p, dp, ddp = (curve.evaluate(t, k) for k in range(3))
            diff = p - x
            g = np.sum(diff * dp, axis=0)
            dg = np.sum(dp * dp, axis=0) + np.sum(diff * ddp, axis=0)
            step = np.where(dg > 0, g / np.where(dg > 0, dg, 1), 0)
            t = t - np.clip(step, -max_step, max_step)

        refined = np.hypot(*(curve.evaluate(t) - x))
        distance = np.minimum(refined, coarse)
        normal = curve.unit_normal(t)

        distance = distance.reshape(self.disk.shape)
        normal = normal.reshape((2,) + self.disk.shape)
        distance[0] = 0
        normal[:, 0, :] = self.normal
        return distance, normal

    @property
    def distance(self):
        return self._foot_points[0]

    @property
    def extended_normal(self):
        return self._foot_points[1]

    @cached_property
    def cutoff(self):
        return cutoff_profile(self.distance / self.collar_width)

    @cached_property
    def q(self):
        """Extended-normal weights q^{ij} = delta^{ij} - eta^2 N^i N^j, Eulerian indices."""
        n = self.extended_normal
        return np.eye(2)[:, :, None, None] - self.cutoff ** 2 * np.einsum('ixy,jxy->ijxy', n, n)


def build_geometry(lagrangian_map, disk=None, eta_threshold=1.0):
    """
    Build the geometry cache for a Lagrangian map.

    :param LagrangianMap lagrangian_map: the flow map; DegenerateMap was already raised on construction if it folds
    :param ReferenceDisk disk: reference grid; must match the map's grid when given
    :param float eta_threshold: normal-turning threshold for the injectivity-radius estimate
    :return GeometryCache:
    """
    if disk is not None and disk != lagrangian_map.disk:
        msg = f'Map lives on {lagrangian_map.disk}, not on {disk}'
        raise ValueError(msg)
    return GeometryCache(lagrangian_map, eta_threshold=eta_threshold)


def injectivity_radius(cache, eta_threshold=1.0):
    """
    Estimate the collar size of the boundary.

    l1 is the shortest chord between boundary points whose unit normals differ by more than eta_threshold, or the
    diameter when no pair does; threshold crossings are located exactly on the trigonometric interpolant.
    l0 = min(l1 / 2, 1 / max|theta|).

    :param GeometryCache cache:
    :param float eta_threshold: in (0, 2]
    :return dict: {'l0': float, 'l1': float}
    """
    if not 0 < eta_threshold <= 2:
        msg = f'eta_threshold must lie in (0, 2], got {eta_threshold}'
        raise ValueError(msg)

    curve = cache.boundary
    oversample = max(2, 512 // curve.n_theta)
    m = oversample * curve.n_theta
    t = 2 * np.pi * np.arange(m) / m
    points = curve.evaluate(t)
    normals = curve.unit_normal(t)

    chord = np.hypot(*(points[:, :, None] - points[:, None, :]))
    turn = np.hypot(*(normals[:, :, None] - normals[:, None, :]))
    excess = turn - eta_threshold
    violating = excess > 1e-12

    if not violating.any():
        l1 = float(chord.max())
    else:
        candidates = [float(chord[violating].min())]
        after = np.roll(excess, -1, axis=1)
        rows, cols = np.nonzero((excess <= 1e-12) & (after > 1e-12) | (excess > 1e-12) & (after <= 1e-12))
        for i, j in zip(rows, cols):
            anchor = normals[:, i]
            lo, hi = t[j], t[j] + 2 * np.pi / m

            def turn_excess(tau):
                return float(np.hypot(*(anchor - curve.unit_normal(tau)))) - eta_threshold

            if turn_excess(lo) * turn_excess(hi) > 0:
                continue
            root = brentq(turn_excess, lo, hi, xtol=1e-15)
            candidates.append(float(np.hypot(*(points[:, i] - curve.evaluate(root)))))
        l1 = min(candidates)

    max_curvature = float(np.abs(cache.curvature).max())
    l0 = min(l1 / 2, 1 / max_curvature) if max_curvature > 0 else l1 / 2
    return {'l0': l0, 'l1': l1}


@dataclass(frozen=True)
class MaterialDerivatives:
    """Material derivatives of the metric, conormal and measures for a velocity field on the current geometry."""
    metric: np.ndarray
    inverse_metric: np.ndarray
    conormal: np.ndarray
    volume_rate: np.ndarray
    surface_rate: np.ndarray
    surface_rate_full: np.ndarray


def geometry_material_derivatives(cache, v):
    """
    Material derivatives of the geometry induced by a velocity field.

    D_t g_ab = A^i_a A^j_b (d_i v_j + d_j v_i); D_t g^ab = -g^ac g^bd D_t g_cd; D_t N_a = -1/2 N_a (D_t g^cd) N_c N_d;
    the volume rate is div v and the surface rate sigma v.N. surface_rate_full is gamma^ij d_i v_j, which equals the
    surface rate whenever the boundary velocity is normal.

    :param GeometryCache cache:
    :param v: Eulerian velocity, a rank-1 Field or an array shaped (2, n_r, n_theta)
    :return MaterialDerivatives:
    """
    data = as_array(v)
    grad = cache.map.eulerian_derivative(data)
    sym = grad + np.swapaxes(grad, 0, 1)
    a = cache.map.jacobian

    dt_metric = np.einsum('iaxy,jbxy,ijxy->abxy', a, a, sym)
    ginv = cache.inverse_metric
    dt_inverse = -np.einsum('acxy,bdxy,cdxy->abxy', ginv, ginv, dt_metric)

    n_low = cache.conormal
    normal_component = np.einsum('cdt,ct,dt->t', dt_inverse[..., 0, :], n_low, n_low)
    dt_conormal = -0.5 * n_low * normal_component

    volume_rate = np.trace(grad)
    boundary_velocity = data[:, 0, :]
    surface_rate = cache.mean_curvature * np.sum(boundary_velocity * cache.normal, axis=0)
    surface_rate_full = np.einsum('ijt,ijt->t', cache.projection_eulerian, grad[..., 0, :])
    return MaterialDerivatives(dt_metric, dt_inverse, dt_conormal, volume_rate, surface_rate, surface_rate_full)
