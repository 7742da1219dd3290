"""
Symbolic expansion of material and spatial derivatives over the term algebra of the free-surface system.

Atoms are sympy symbols standing for
    h(b, d1, d2)  = d_1^d1 d_2^d2 D_t^b h,
    v(j, d1, d2)  = d_1^d1 d_2^d2 v^j,
    e(m)          = e^(m)(h).
Material derivatives of velocity atoms are rewritten with the momentum equation D_t v = -dh, and D_t is moved through
spatial derivatives with [D_t, d_i] = -(d_i v^k) d_k. Both operators are derivations, so they act on polynomials
through the chain rule over the atoms they contain. Expansions are compiled to numpy callables and evaluated on the
grid by an AtomTable that caches every repeated Eulerian derivative it is asked for.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from calculus.fields import Field, as_array
from calculus.norms import tail_fraction
from utils.core import get_logger
from utils.errors import DegenerateEos, ResolutionInsufficient, MissingField

__all__ = ['h_atom', 'v_atom', 'e_atom', 'atom_info', 'spatial', 'material', 'material_power', 'laplacian_atom',
           'f_term', 'g_term', 'velocity_time_derivative', 'builder_source', 'AtomTable', 'evaluate',
           'DerivedTimeFields', 'derive_time_fields', 'TAIL_LIMIT', 'TAIL_FLOOR']

TAIL_LIMIT = 0.1
TAIL_FLOOR = 1e-8

_ATOMS = {}


def _register(name, info):
    symbol = sp.Symbol(name, real=True)
    _ATOMS[symbol] = info
    return symbol


@lru_cache(maxsize=None)
def h_atom(b, d1=0, d2=0):
    return _register(f'h_{b}_{d1}{d2}', ('h', b, d1, d2))


@lru_cache(maxsize=None)
def v_atom(j, d1=0, d2=0):
    return _register(f'v{j + 1}_{d1}{d2}', ('v', j, d1, d2))


@lru_cache(maxsize=None)
def e_atom(m):
    return _register(f'e_{m}', ('e', m))


def atom_info(symbol):
    return _ATOMS[symbol]


def _unit(i):
    return (1, 0) if i == 0 else (0, 1)


def _derive(expr, rule):
    """Apply the derivation defined on atoms by `rule` to a polynomial expression."""
    expr = sp.sympify(expr)
    result = sp.S.Zero
    for atom in expr.free_symbols:
        result += sp.diff(expr, atom) * rule(atom)
    return sp.expand(result)


def _spatial_atom(i, atom):
    kind, *rest = atom_info(atom)
    di = _unit(i)
    if kind == 'e':
        return e_atom(rest[0] + 1) * h_atom(0, *di)
    head, d1, d2 = rest
    maker = h_atom if kind == 'h' else v_atom
    return maker(head, d1 + di[0], d2 + di[1])


def spatial(i, expr):
    """Eulerian partial derivative d_i of an expression."""
    return _derive(expr, lambda atom: _spatial_atom(i, atom))


@lru_cache(maxsize=None)
def _material_atom(atom):
    kind, *rest = atom_info(atom)
    if kind == 'e':
        return e_atom(rest[0] + 1) * h_atom(1)
    head, d1, d2 = rest
    if d1 == 0 and d2 == 0:
        if kind == 'h':
            return h_atom(head + 1)
        return -h_atom(0, *_unit(head))

    # D_t d_i G = d_i D_t G - (d_i v^k) d_k G
    i = 0 if d1 > 0 else 1
    di = _unit(i)
    maker = h_atom if kind == 'h' else v_atom
    inner = maker(head, d1 - di[0], d2 - di[1])
    result = spatial(i, _material_atom(inner))
    for k in range(2):
        result -= v_atom(k, *di) * spatial(k, inner)
    return sp.expand(result)


def material(expr):
    """Material derivative D_t of an expression."""
    return _derive(expr, _material_atom)


def material_power(expr, times):
    for _ in range(times):
        expr = material(expr)
    return expr


def laplacian_atom(b):
    return h_atom(b, 2, 0) + h_atom(b, 0, 2)


def _strain_contraction():
    return sum(v_atom(j, *_unit(i)) * v_atom(i, *_unit(j)) for i in range(2) for j in range(2))


@lru_cache(maxsize=None)
def f_term(r):
    """f_r = D_t^(r-1) ((d_i v^j)(d_j v^i)) + D_t^(r-1) Lap h - Lap D_t^(r-1) h."""
    if r < 1:
        msg = f'f_r is defined for r >= 1, got {r}'
        raise ValueError(msg)
    strain = material_power(_strain_contraction(), r - 1)
    commutator = material_power(laplacian_atom(0), r - 1) - laplacian_atom(r - 1)
    return sp.expand(strain + commutator)


@lru_cache(maxsize=None)
def g_term(r):
    """g_r = e' D_t^(r+1) h - D_t^(r+1) e(h): everything in D_t^(r+1) e(h) below the top time derivative."""
    return sp.expand(e_atom(1) * h_atom(r + 1) - material_power(e_atom(0), r + 1))


@lru_cache(maxsize=None)
def velocity_time_derivative(k, j):
    """D_t^k v^j expressed through enthalpy atoms, for k >= 1."""
    if k < 1:
        return v_atom(j)
    return material_power(-h_atom(0, *_unit(j)), k - 1)


def builder_source(k):
    """F_k = f_(k+1) at t = 0, the source of the k-th time-differentiated wave equation."""
    return f_term(k + 1)


class AtomTable:
    """
    Numerical values of atoms on the grid, for one geometry, enthalpy time derivatives h_b, velocity and EOS.

    Eulerian derivatives are computed by repeated spectral differentiation and cached per (field, multi-index).
    """

    def __init__(self, cache, h_fields, v_field, eos=None):
        """
        :param GeometryCache cache: geometry the fields live on
        :param list h_fields: arrays or Fields for h_0, h_1, ...
        :param v_field: rank-1 Field or array (2, n_r, n_theta)
        :param EosFamily eos: needed only when e^(m) atoms appear
        """
        self.cache = cache
        self.h = [as_array(f) for f in h_fields]
        self.v = as_array(v_field)
        self.eos = eos
        self._values = {}

    def _base(self, kind, head):
        if kind == 'h':
            if head >= len(self.h):
                msg = f'Expansion needs D_t^{head} h, only {len(self.h)} enthalpy fields available'
                raise MissingField(msg, name=f'h{head}')
            return self.h[head]
        return self.v[head]

    def _derivative(self, kind, head, d1, d2):
        key = (kind, head, d1, d2)
        if key not in self._values:
            if d1 == 0 and d2 == 0:
                value = self._base(kind, head)
            elif d1 > 0:
                value = self.cache.map.eulerian_partial(self._derivative(kind, head, d1 - 1, d2), 0)
            else:
                value = self.cache.map.eulerian_partial(self._derivative(kind, head, d1, d2 - 1), 1)
            self._values[key] = value
        return self._values[key]

    def value(self, atom):
        kind, *rest = atom_info(atom)
        if kind == 'e':
            if self.eos is None:
                msg = 'Expansion contains e^(m)(h) but no equation of state was given'
                raise MissingField(msg, name='eos')
            key = ('e', rest[0])
            if key not in self._values:
                self._values[key] = self.eos.derivative(rest[0], self.h[0]) * np.ones(self.cache.disk.shape)
            return self._values[key]
        return self._derivative(kind, *rest)


@lru_cache(maxsize=None)
def _compile(expr):
    atoms = tuple(sorted(expr.free_symbols, key=lambda s: s.name))
    return atoms, sp.lambdify(atoms, expr, modules='numpy', cse=True)


def evaluate(expr, table):
    """
    Evaluate an expansion on the grid.

    :param expr: sympy expression over atoms
    :param AtomTable table:
    :return np.ndarray: values shaped (n_r, n_theta)
    """
    expr = sp.sympify(expr)
    shape = table.cache.disk.shape
    if not expr.free_symbols:
        return np.full(shape, float(expr))
    atoms, fn = _compile(expr)
    return np.broadcast_to(np.asarray(fn(*[table.value(a) for a in atoms]), dtype=float), shape).copy()


@dataclass
class DerivedTimeFields:
    """Material time derivatives h_k = D_t^k h (k <= r+1) and v_k = D_t^k v (k <= r) computed from the equations."""
    h: list
    v: list
    order: int
    provenance: str = 'wave-hierarchy'
    tails: dict = field(default_factory=dict)
    boundary: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.order


def _check_resolution(disk, name, data):
    fraction, total = tail_fraction(disk, data)
    if fraction > TAIL_LIMIT and total > TAIL_FLOOR:
        msg = f'Derived field {name} is under-resolved: {fraction:.1%} of its coefficient norm is in the upper third'
        raise ResolutionInsufficient(msg, tail_fraction=fraction)
    return fraction


def derive_time_fields(state, eos, r, cache=None, logger=None):
    """
    Time derivatives of h and v up to the requested order from the wave hierarchy.

    h_(k+1) = (Lap h_(k-1) + f_k + g_k) / e'(h) for k = 1..r, and D_t^k v from the momentum equation.

    :param SimState state: provides map, v, h and hdot
    :param EosFamily eos: equation of state; the incompressible member only supports r = 0
    :param int r: energy order, 0 <= r <= 4
    :param GeometryCache cache: geometry of the state, rebuilt when omitted
    :param logger: optional logger
    :return DerivedTimeFields:
    """
    logger = get_logger(logger)
    if not 0 <= r <= 4:
        msg = f'Derived time fields are supported for orders 0..4, got {r}'
        raise ValueError(msg)
    if r >= 1 and eos.incompressible:
        msg = 'Time derivatives beyond D_t h need e\'(h) > 0; the incompressible member cannot provide them'
        raise DegenerateEos(msg)

    cache = cache if cache is not None else state.geometry()
    disk = cache.disk
    h_list = [state.h.data, state.hdot.data]
    e1 = eos.derivative(1, state.h.data)
    tails, boundary = {}, {}

    for k in range(1, r + 1):
        table = AtomTable(cache, h_list, state.v, eos)
        rhs = evaluate(laplacian_atom(k - 1) + f_term(k) + g_term(k), table)
        h_next = rhs / e1
        # compatible data keeps this trace at zero; it is reported, never imposed
        boundary[f'h{k + 1}'] = float(np.abs(h_next[0]).max())
        tails[f'h{k + 1}'] = _check_resolution(disk, f'h{k + 1}', h_next)
        h_list.append(h_next)
        logger.debug(f'derived h{k + 1}: max |h| = {np.abs(h_next).max():.3e}')

    table = AtomTable(cache, h_list, state.v, eos)
    v_list = [state.v]
    for k in range(1, r + 1):
        data = np.stack([evaluate(velocity_time_derivative(k, j), table) for j in range(2)])
        tails[f'v{k}'] = _check_resolution(disk, f'v{k}', data)
        v_list.append(Field(data, 1))

    return DerivedTimeFields([Field(h) for h in h_list], v_list, r, tails=tails, boundary=boundary)
