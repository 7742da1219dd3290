"""
Differential operators on the moving domain.

Every derivative is a spectral derivative in the reference labels composed with the inverse Jacobian, so fields never
leave the reference grid. New derivative indices are always placed first.
"""
from itertools import permutations
from math import factorial

import numpy as np

from calculus.fields import Field, EULERIAN, LAGRANGIAN
from utils.errors import RankMismatch, FrameMismatch

__all__ = ['eulerian_gradient', 'repeated_gradient', 'laplace_beltrami', 'div_curl', 'symmetric_dot',
           'boundary_project', 'hessian', 'l2_norm', 'boundary_l2_norm', 'weight_slots']


def _require_eulerian(f):
    if f.frame != EULERIAN:
        msg = f'Eulerian derivatives need Eulerian components, got a {f.frame} field'
        raise FrameMismatch(msg)


def eulerian_gradient(f, cache):
    """
    Eulerian gradient d_i f with the new index first.

    :param Field f: field of rank <= 3 on the full grid
    :param GeometryCache cache: geometry of the current configuration
    :return Field: rank + 1
    """
    _require_eulerian(f)
    if f.rank >= 4:
        msg = 'Gradient of a rank-4 field exceeds the supported rank'
        raise RankMismatch(msg)
    return Field(cache.map.eulerian_derivative(f.data), f.rank + 1)


def repeated_gradient(f, cache, order):
    """d^order f, derivative indices first (innermost derivative last before the original indices)."""
    for _ in range(order):
        f = eulerian_gradient(f, cache)
    return f


def hessian(q, cache):
    return repeated_gradient(q, cache, 2)


def laplace_beltrami(h, cache):
    """
    Laplacian of a scalar in divergence form, (1/J) d_a (J g^ab d_b h), with Cartesian reference derivatives d_a.

    :param Field h: scalar field
    :param GeometryCache cache:
    :return Field: scalar
    """
    if h.rank:
        msg = f'Laplace-Beltrami acts on scalars, got rank {h.rank}'
        raise RankMismatch(msg)
    disk = cache.disk
    jac = cache.volume_factor
    flux = jac * np.einsum('abxy,bxy->axy', cache.inverse_metric, disk.dy(h.data))
    div = disk.dy(flux[0])[0] + disk.dy(flux[1])[1]
    return Field(div / jac, 0, h.frame)


def div_curl(v, cache):
    """
    Divergence and curl of an Eulerian vector field.

    :param Field v: rank-1 field
    :param GeometryCache cache:
    :return tuple: (div v, curl v) with curl_ij = d_i v_j - d_j v_i as a rank-2 field
    """
    if v.rank != 1:
        msg = f'div_curl needs a vector field, got rank {v.rank}'
        raise RankMismatch(msg)
    grad = eulerian_gradient(v, cache).data
    div = Field(np.trace(grad), 0)
    curl = Field(grad - np.swapaxes(grad, 0, 1), 2)
    return div, curl


def symmetric_dot(a, b):
    """
    Symmetric dot product of d^(1+s) v with an r-s tensor.

    The last (vector) index of a is contracted with the first index of b; the remaining r free indices are
    symmetrized with weight 1/r!.

    :param Field a: rank s + 2 field, derivative indices first, vector index last
    :param Field b: rank r - s field
    :return Field: rank r
    """
    if a.rank < 2 or b.rank < 1:
        msg = f'symmetric_dot needs a rank >= 2 left operand and rank >= 1 right operand, got {a.rank}, {b.rank}'
        raise RankMismatch(msg)
    if a.frame != b.frame:
        msg = f'Cannot contract {a.frame} with {b.frame} fields'
        raise FrameMismatch(msg)

    r = a.rank + b.rank - 2
    if r > 4:
        msg = f'symmetric_dot result rank {r} exceeds the supported rank'
        raise RankMismatch(msg)
    contracted = _contract(a.data, a.rank, b.data, b.rank)
    if r <= 1:
        return Field(contracted, r, a.frame)

    total = np.zeros_like(contracted)
    for perm in permutations(range(r)):
        total += np.transpose(contracted, perm + tuple(range(r, contracted.ndim)))
    return Field(total / factorial(r), r, a.frame)


def _contract(a, rank_a, b, rank_b):
    """Contract the last index of a with the first index of b node by node."""
    letters = 'abcdefgh'
    left = letters[:rank_a - 1]
    right = letters[rank_a - 1:rank_a - 1 + rank_b - 1]
    return np.einsum(f'{left}k...,k{right}...->{left}{right}...', a, b)


def boundary_project(s, cache):
    """
    Tangential projection of every index of a tensor on the boundary.

    Lagrangian fields are projected with gamma_a^b, Eulerian fields with delta_ij - n_i n_j.

    :param Field s: tensor field on the full grid or restricted to the boundary
    :param GeometryCache cache:
    :return Field: boundary field of the same rank
    """
    s = s.boundary()
    gamma = cache.projection if s.frame == LAGRANGIAN else cache.projection_eulerian
    data = s.data
    for slot in range(s.rank):
        data = np.moveaxis(np.einsum('abt,b...t->a...t', gamma, np.moveaxis(data, slot, 0)), 0, slot)
    return Field(data, s.rank, s.frame)


def l2_norm(f, cache):
    """L2 norm over the physical domain, all components summed."""
    return float(np.sqrt(max(cache.integrate(f.pointwise_norm_squared()), 0.0)))


def boundary_l2_norm(f, cache):
    """L2 norm over the physical boundary, all components summed."""
    return float(np.sqrt(max(cache.integrate_boundary(f.boundary().pointwise_norm_squared()), 0.0)))


def weight_slots(data, weight, slots):
    """Apply a pointwise (2, 2) tensor to each of the leading `slots` index slots of tensor data."""
    for slot in range(slots):
        data = np.moveaxis(np.einsum('ij...,j...->i...', weight, np.moveaxis(data, slot, 0)), 0, slot)
    return data
