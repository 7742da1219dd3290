"""
Empirical constants of the inequalities used to control the free boundary: Poincare, projection formula on the
boundary, Hodge-type decomposition and trace.
"""
import numpy as np
from scipy.special import jn_zeros

from calculus.fields import Field
from calculus.operators import (eulerian_gradient, repeated_gradient, laplace_beltrami, boundary_project, l2_norm,
                                boundary_l2_norm, weight_slots)
from utils.errors import BoundaryNonzero

__all__ = ['BESSEL_J0_ROOT', 'BOUNDARY_TOLERANCE', 'poincare_check', 'projection_formula_check', 'hodge_check',
           'trace_check', 'faber_krahn_reference']

BESSEL_J0_ROOT = float(jn_zeros(0, 1)[0])
BOUNDARY_TOLERANCE = 1e-10


def _require_zero_boundary(q):
    values = np.abs(q.data[0])
    limit = BOUNDARY_TOLERANCE * max(1.0, float(np.abs(q.data).max()))
    if values.max() > limit:
        msg = f'Field must vanish on the boundary, found |q| = {values.max():.3e}'
        raise BoundaryNonzero(msg, max_value=float(values.max()))


def _ratio(numerator, denominator):
    if numerator == 0:
        return 0.0
    return numerator / denominator if denominator > 0 else np.inf


def faber_krahn_reference(cache):
    """Poincare constant of the disk with the same area, (vol / pi)^(1/2) / j_{0,1}."""
    return float(np.sqrt(cache.volume / np.pi) / BESSEL_J0_ROOT)


def poincare_check(q, cache):
    """
    Poincare ratios of a function vanishing on the boundary.

    :param Field q: scalar field with q = 0 on the boundary
    :param GeometryCache cache:
    :return dict: ratio1 = ||q|| / ||dq||, ratio2 = ||dq|| / ||Lap q|| and the Faber-Krahn reference
    """
    _require_zero_boundary(q)
    norm_q = l2_norm(q, cache)
    norm_grad = l2_norm(eulerian_gradient(q, cache), cache)
    norm_lap = l2_norm(laplace_beltrami(q, cache), cache)
    ratio1 = _ratio(norm_q, norm_grad)
    ratio2 = _ratio(norm_grad, norm_lap)
    reference = faber_krahn_reference(cache)
    return {'ratio1': ratio1, 'ratio2': ratio2, 'reference': reference,
            'finite': bool(np.isfinite(ratio1) and np.isfinite(ratio2)), 'passed': ratio1 <= reference * (1 + 1e-6)}


def projection_formula_check(q, cache):
    """
    Boundary residual of Pi d^2 q = theta N.dq for q vanishing on the boundary.

    :return float: L2 norm over the boundary
    """
    _require_zero_boundary(q)
    hess = repeated_gradient(q, cache, 2)
    projected = boundary_project(hess, cache).data
    normal_derivative = np.sum(cache.normal * eulerian_gradient(q, cache).data[:, 0, :], axis=0)
    residual = Field(projected - cache.second_fundamental_form_eulerian * normal_derivative, 2)
    return boundary_l2_norm(residual, cache)


def hodge_check(u, cache, r=0):
    """
    Empirical constant of the Hodge-type bound for beta = d^r u.

    int |d beta|^2 <= C int (eta^2 N^i N^j q^{IJ} d_k beta_Ii d_k beta_Jj + |div beta|^2 + |curl beta|^2
    + K^2 |beta|^2), with K the geometry monitor. A pointwise boundary ratio |d beta|^2 / (|tangential d beta|^2 +
    |div beta|^2 + |curl beta|^2) is reported alongside.

    :param Field u: vector field
    :param GeometryCache cache:
    :param int r: number of derivatives applied to u
    :return dict: constant C (1 when both sides vanish), lhs, rhs, K and the pointwise boundary ratio
    """
    beta = repeated_gradient(u, cache, r)
    grad = eulerian_gradient(beta, cache).data
    # grad[k, I..., j] = d_k beta_{I j}
    div = np.trace(grad, axis1=0, axis2=r + 1)
    curl = grad - np.swapaxes(grad, 0, r + 1)

    n = cache.extended_normal
    weight = cache.cutoff ** 2
    normal_part = np.sum(grad * n[(None,) * (r + 1)], axis=r + 1)
    weighted = weight_slots(np.moveaxis(normal_part, 0, -3), cache.q, r)
    tangential = weight * np.sum(weighted * np.moveaxis(normal_part, 0, -3), axis=tuple(range(r + 1)))

    k_monitor = cache.apriori_k
    lhs = float(cache.integrate(np.sum(grad ** 2, axis=tuple(range(r + 2)))))
    density = tangential + np.sum(div ** 2, axis=tuple(range(r))) + np.sum(curl ** 2, axis=tuple(range(r + 2)))
    density = density + k_monitor ** 2 * beta.pointwise_norm_squared()
    rhs = float(cache.integrate(density))

    if lhs == 0 and rhs == 0:
        constant = 1.0
    else:
        constant = lhs / rhs if rhs > 0 else np.inf

    g0 = grad[..., 0, :]
    tangential_grad = np.einsum('klt,l...t->k...t', cache.projection_eulerian, g0)
    top = np.sum(g0 ** 2, axis=tuple(range(r + 2)))
    bottom = (np.sum(tangential_grad ** 2, axis=tuple(range(r + 2))) + np.sum(div[..., 0, :] ** 2, axis=tuple(range(r)))
              + np.sum(curl[..., 0, :] ** 2, axis=tuple(range(r + 2))))
    with np.errstate(divide='ignore', invalid='ignore'):
        ratios = np.where(bottom > 0, top / bottom, np.where(top > 0, np.inf, 1.0))
    return {'constant': constant, 'lhs': lhs, 'rhs': rhs, 'K': k_monitor, 'pointwise': float(ratios.max())}


def trace_check(alpha, cache):
    """
    Trace ratio ||alpha||_{L2(boundary)} / (||alpha|| + ||d alpha||) and the bound sqrt(max(1, K)).

    :param Field alpha:
    :param GeometryCache cache:
    :return dict:
    """
    boundary = boundary_l2_norm(alpha, cache)
    interior = l2_norm(alpha, cache) + l2_norm(eulerian_gradient(alpha, cache), cache)
    ratio = _ratio(boundary, interior)
    bound = float(np.sqrt(max(1.0, cache.apriori_k)))
    return {'ratio': ratio, 'bound': bound, 'passed': bool(ratio <= bound * (1 + 1e-9))}
