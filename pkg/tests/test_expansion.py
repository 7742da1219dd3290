import numpy as np
import pytest
import sympy as sp
from numpy.testing import assert_allclose

from calculus import Field
from physics import (h_atom, v_atom, e_atom, spatial, material, material_power, f_term, g_term,
                     velocity_time_derivative, builder_source, AtomTable, evaluate, derive_time_fields, LinearFamily,
                     IncompressibleMember)
from simulation import SimState
from utils.errors import DegenerateEos, MissingField

from seeds import quadrupole


def _same(a, b):
    return sp.expand(a - b) == 0


def test_material_derivative_of_atoms():
    assert _same(material(h_atom(0)), h_atom(1))
    assert _same(material(v_atom(1)), -h_atom(0, 0, 1))
    assert _same(material(e_atom(0)), e_atom(1) * h_atom(1))


def test_material_derivative_moves_through_spatial_derivatives():
    # D_t d_1 h = d_1 D_t h - (d_1 v^k) d_k h
    expected = h_atom(1, 1, 0) - v_atom(0, 1, 0) * h_atom(0, 1, 0) - v_atom(1, 1, 0) * h_atom(0, 0, 1)
    assert _same(material(h_atom(0, 1, 0)), expected)


def test_spatial_derivative_is_a_derivation():
    assert _same(spatial(0, e_atom(0)), e_atom(1) * h_atom(0, 1, 0))
    product = spatial(1, h_atom(0) * v_atom(0))
    assert _same(product, h_atom(0, 0, 1) * v_atom(0) + h_atom(0) * v_atom(0, 0, 1))


def test_material_power():
    assert _same(material_power(h_atom(0), 3), h_atom(3))
    assert material_power(v_atom(0), 0) == v_atom(0)


def test_wave_hierarchy_terms():
    assert g_term(0) == 0
    assert _same(g_term(1), -e_atom(2) * h_atom(1) ** 2)
    strain = sum(v_atom(j, *((1, 0) if i == 0 else (0, 1))) * v_atom(i, *((1, 0) if j == 0 else (0, 1)))
                 for i in range(2) for j in range(2))
    assert _same(f_term(1), strain)
    assert _same(builder_source(0), f_term(1))
    with pytest.raises(ValueError):
        f_term(0)


def test_velocity_time_derivatives():
    assert velocity_time_derivative(0, 1) == v_atom(1)
    assert _same(velocity_time_derivative(1, 0), -h_atom(0, 1, 0))
    assert _same(velocity_time_derivative(2, 1), material(-h_atom(0, 0, 1)))


def test_evaluate_strain_of_the_quadrupole(disk, cache):
    table = AtomTable(cache, [Field.zeros(disk)], Field(quadrupole(disk.y), 1))
    assert_allclose(evaluate(builder_source(0), table), 8, atol=1e-11)
    assert_allclose(evaluate(sp.Integer(3), table), 3)


def test_atom_table_reports_missing_fields(disk, cache, bubble):
    table = AtomTable(cache, [bubble], Field.zeros(disk, 1))
    with pytest.raises(MissingField) as e:
        evaluate(h_atom(2), table)
    assert e.value.name == 'h2'
    with pytest.raises(MissingField):
        evaluate(e_atom(1), table)
    assert_allclose(evaluate(e_atom(1), AtomTable(cache, [bubble], Field.zeros(disk, 1), LinearFamily(4.0))), 0.25)


def test_derived_fields_of_compatible_pressure(disk, cache, bubble):
    # h = p0 of the quadrupole solves Lap h = -(d_i v^j)(d_j v^i), so D_t^2 h vanishes
    state = SimState.initial(disk, LinearFamily(1.0), Field(quadrupole(disk.y), 1), 2 * bubble)
    derived = derive_time_fields(state, state.eos, 1, cache)

    assert len(derived.h) == 3
    assert len(derived.v) == 2
    assert derived.r == 1
    assert_allclose(derived.h[2].data, 0, atol=1e-8)
    assert_allclose(derived.v[1].data, 4 * disk.y, atol=1e-9)
    assert set(derived.tails) == {'h2', 'v1'}


def test_derived_fields_of_order_zero(disk, cache, bubble):
    state = SimState.initial(disk, LinearFamily(10.0), Field.zeros(disk, 1), bubble)
    derived = derive_time_fields(state, state.eos, 0, cache)
    assert len(derived.h) == 2
    assert len(derived.v) == 1
    assert derived.provenance == 'wave-hierarchy'


def test_derived_fields_argument_checks(disk, cache):
    state = SimState.at_rest(disk, IncompressibleMember())
    with pytest.raises(DegenerateEos):
        derive_time_fields(state, state.eos, 1, cache)
    assert len(derive_time_fields(state, state.eos, 0, cache).h) == 2
    with pytest.raises(ValueError):
        derive_time_fields(state.replace(eos=LinearFamily(1.0)), LinearFamily(1.0), 5, cache)


def test_derived_fields_keep_their_boundary_values(disk, cache, bubble):
    # at rest with h = 1 - r^2: e' D_t^2 h = Lap h = -4, so h2 = -400 everywhere, the boundary included
    state = SimState.initial(disk, LinearFamily(100.0), Field.zeros(disk, 1), bubble)
    derived = derive_time_fields(state, state.eos, 1, cache)
    assert_allclose(derived.h[2].data, -400, rtol=1e-9)
    assert derived.boundary['h2'] == pytest.approx(400, rel=1e-9)
    assert_allclose(derived.v[1].data, 2 * disk.y, atol=1e-10)


def test_compatible_pressure_has_a_vanishing_boundary_trace(disk, cache, bubble):
    state = SimState.initial(disk, LinearFamily(100.0), Field(quadrupole(disk.y), 1), 2 * bubble)
    derived = derive_time_fields(state, state.eos, 1, cache)
    assert derived.boundary['h2'] <= 1e-6


def test_derived_fields_at_rest_vanish(disk, cache):
    state = SimState.at_rest(disk, LinearFamily(100.0))
    derived = derive_time_fields(state, state.eos, 2, cache)
    for h in derived.h:
        assert_allclose(h.data, 0)
    assert derived.boundary == {'h2': 0.0, 'h3': 0.0}
