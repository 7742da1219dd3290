"""
Discrete residuals of the commutator identities between the material derivative and spatial derivatives.

The test field is a closed-form Eulerian function F(x1, x2) pulled back to the labels, f = F(x(t, y)). Its material
derivative is exactly v^k d_k F, so every term that involves D_t of a pulled-back derivative of F is evaluated in closed
form and the residual isolates the spatial discretization error of the spectral side.
"""
from itertools import product
from math import comb

import numpy as np
import sympy as sp

from calculus.fields import Field
from calculus.operators import repeated_gradient, laplace_beltrami, symmetric_dot, l2_norm

__all__ = ['COMMUTATOR_KINDS', 'X1', 'X2', 'analytic_derivative', 'commutator_residual']

COMMUTATOR_KINDS = ('Dt_grad', 'Dt_gradr', 'Laplace_Dt')

X1, X2 = sp.symbols('x1 x2', real=True)


def _as_expr(expr):
    """Strings name the coordinates x1, x2; they are bound to X1, X2 rather than to fresh symbols."""
    return sp.sympify(expr, locals={'x1': X1, 'x2': X2})


def analytic_derivative(expr, order, positions):
    """
    The order-th Eulerian derivative tensor of a closed-form scalar, evaluated at node positions.

    :param expr: sympy expression in x1, x2
    :param int order: number of derivatives
    :param np.ndarray positions: shape (2, n_r, n_theta)
    :return Field: rank = order
    """
    expr = _as_expr(expr)
    grid = positions.shape[1:]
    data = np.empty((2,) * order + grid)
    for index in product(range(2), repeat=order):
        component = expr
        for i in index:
            component = sp.diff(component, (X1, X2)[i])
        fn = sp.lambdify((X1, X2), component, 'numpy')
        data[index] = np.broadcast_to(np.asarray(fn(positions[0], positions[1]), dtype=float), grid)
    return Field(data, order)


def _material_of_derivative(expr, order, positions, v):
    """D_t d^order f = v^k d_k d^order F."""
    higher = analytic_derivative(expr, order + 1, positions).data
    return Field(np.sum(higher * v.data[(slice(None),) + (None,) * order], axis=0), order)


def commutator_residual(kind, order, state, test_field, cache=None):
    """
    L2 norm of the difference between the two sides of a commutator identity.

    Dt_grad:    [D_t, d_i] f = -(d_i v^k) d_k f
    Dt_gradr:   [D_t, d^r] f = -sum_{s<r} C(r, s+1) (d^(1+s) v) ~. d^(r-s) f
    Laplace_Dt: [Lap, D_t] f = (Lap v^j) d_j f + 2 (d^i v^j) d_i d_j f

    :param str kind: one of COMMUTATOR_KINDS
    :param int order: derivative order r for Dt_gradr; ignored by the other kinds
    :param SimState state: provides the map and the velocity
    :param test_field: sympy expression (or string) in x1, x2
    :param GeometryCache cache: geometry of the state, rebuilt when omitted
    :return dict: residual, lhs and rhs norms
    """
    if kind not in COMMUTATOR_KINDS:
        msg = f'Unknown commutator kind {kind!r}; expected one of {COMMUTATOR_KINDS}'
        raise ValueError(msg)

    cache = cache if cache is not None else state.geometry()
    positions = cache.map.positions
    v = state.v
    expr = _as_expr(test_field)
    dt_f = Field(np.einsum('k...,k...->...', analytic_derivative(expr, 1, positions).data, v.data))

    if kind == 'Laplace_Dt':
        lap_expr = sp.diff(expr, X1, 2) + sp.diff(expr, X2, 2)
        lhs = laplace_beltrami(dt_f, cache) - _material_of_derivative(lap_expr, 0, positions, v)
        lap_v = np.stack([laplace_beltrami(Field(v.data[j]), cache).data for j in range(2)])
        grad_v = repeated_gradient(v, cache, 1).data
        grad_f = analytic_derivative(expr, 1, positions).data
        hess_f = analytic_derivative(expr, 2, positions).data
        rhs = Field(np.einsum('j...,j...->...', lap_v, grad_f) + 2 * np.einsum('ij...,ij...->...', grad_v, hess_f))
    else:
        r = 1 if kind == 'Dt_grad' else order
        if r < 1:
            msg = f'Commutator order must be at least 1, got {r}'
            raise ValueError(msg)
        lhs = _material_of_derivative(expr, r, positions, v) - repeated_gradient(dt_f, cache, r)
        rhs = Field.zeros(cache.disk, rank=r)
        for s in range(r):
            term = symmetric_dot(repeated_gradient(v, cache, 1 + s), analytic_derivative(expr, r - s, positions))
            rhs = rhs - comb(r, s + 1) * term

    residual = l2_norm(lhs - rhs, cache)
    return {'kind': kind, 'order': order, 'residual': residual, 'lhs_norm': l2_norm(lhs, cache),
            'rhs_norm': l2_norm(rhs, cache)}
