import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import j0

from calculus import Field
from elliptic import (EllipticProblem, solve_report, solve_dirichlet, solve_neumann, poincare_check,
                      projection_formula_check, hodge_check, trace_check, faber_krahn_reference, BESSEL_J0_ROOT)
from utils.errors import IncompatibleNeumann, BoundaryNonzero

from seeds import ASPECT, quadrupole


def test_dirichlet_on_the_disk(disk, cache, bubble):
    report = solve_report(EllipticProblem(Field(np.full(disk.shape, -8.0)), cache))
    assert report.method == 'modal'
    assert report.residual <= 1e-10
    assert_allclose(report.solution.data, 2 * bubble, atol=1e-11)

    harmonic = solve_dirichlet(np.zeros(disk.shape), cache, value=np.cos(disk.theta))
    assert_allclose(harmonic.data, disk.y[0], atol=1e-11)


def test_dirichlet_on_an_ellipse(ellipse_map, ellipse_cache):
    x1, x2 = ellipse_map.positions
    rhs = Field(np.full(x1.shape, -2 / ASPECT ** 2 - 2 * ASPECT ** 2))
    report = solve_report(EllipticProblem(rhs, ellipse_cache))
    assert report.method == 'gmres'
    assert report.iterations > 0
    assert_allclose(report.solution.data, 1 - x1 ** 2 / ASPECT ** 2 - ASPECT ** 2 * x2 ** 2, atol=1e-8)


def test_neumann_returns_the_mean_free_solution(disk, cache):
    q = solve_neumann(np.zeros(disk.shape), cache, flux=np.cos(disk.theta))
    assert_allclose(q.data, disk.y[0], atol=1e-10)
    assert cache.integrate(q.data) == pytest.approx(0, abs=1e-12)


def test_neumann_compatibility(disk, cache):
    problem = EllipticProblem(Field(np.ones(disk.shape)), cache, 'neumann')
    assert problem.defect == pytest.approx(np.pi, rel=1e-12)
    with pytest.raises(IncompatibleNeumann) as e:
        solve_neumann(np.ones(disk.shape), cache, project_mean=False)
    assert e.value.defect == pytest.approx(np.pi, rel=1e-12)
    # projected: Lap q = 1 - 1 = 0 with zero flux
    assert_allclose(solve_neumann(np.ones(disk.shape), cache).data, 0, atol=1e-10)


def test_problem_validation(disk, cache):
    rhs = Field(np.zeros(disk.shape))
    with pytest.raises(ValueError):
        EllipticProblem(rhs, cache, tolerance=1e-3)
    with pytest.raises(ValueError):
        EllipticProblem(rhs, cache, kind='robin')
    with pytest.raises(ValueError):
        EllipticProblem(Field.zeros(disk, 1), cache)
    assert solve_report(EllipticProblem(rhs, cache)).iterations == 0


def test_poincare_of_the_first_eigenfunction(disk, cache):
    rr, _ = disk.mesh
    result = poincare_check(Field(j0(BESSEL_J0_ROOT * rr)), cache)
    assert result['ratio1'] == pytest.approx(0.415831, abs=1e-6)
    assert result['reference'] == pytest.approx(1 / BESSEL_J0_ROOT, rel=1e-12)
    assert result['finite']
    assert result['passed']


def test_poincare_of_a_bubble(cache, bubble):
    result = poincare_check(Field(bubble), cache)
    assert result['ratio1'] == pytest.approx(1 / np.sqrt(6), rel=1e-10)
    assert result['ratio2'] == pytest.approx(1 / np.sqrt(8), rel=1e-10)
    assert result['passed']


def test_poincare_needs_zero_boundary_values(disk, cache):
    with pytest.raises(BoundaryNonzero):
        poincare_check(Field(np.ones(disk.shape)), cache)


def test_faber_krahn_reference_depends_on_area(cache, ellipse_cache):
    assert faber_krahn_reference(cache) == pytest.approx(faber_krahn_reference(ellipse_cache), rel=1e-12)


def test_projection_formula(cache, bubble, ellipse_map, ellipse_cache):
    assert projection_formula_check(Field(bubble), cache) <= 1e-8
    x1, x2 = ellipse_map.positions
    assert projection_formula_check(Field(1 - x1 ** 2 / ASPECT ** 2 - ASPECT ** 2 * x2 ** 2), ellipse_cache) <= 1e-8


def test_trace_of_a_constant(disk, cache):
    result = trace_check(Field(np.ones(disk.shape)), cache)
    # sqrt(2 pi) / sqrt(pi)
    assert result['ratio'] == pytest.approx(np.sqrt(2), rel=1e-12)
    assert result['bound'] == pytest.approx(np.sqrt(3), rel=1e-12)
    assert result['passed']


def test_hodge_constant_is_finite(disk, cache, ellipse_map, ellipse_cache):
    result = hodge_check(Field(quadrupole(disk.y), 1), cache)
    assert np.isfinite(result['constant'])
    assert result['lhs'] == pytest.approx(8 * np.pi, rel=1e-10)
    assert result['K'] == pytest.approx(3.0)

    higher = hodge_check(Field(quadrupole(ellipse_map.positions) * ellipse_map.positions[0], 1), ellipse_cache, r=1)
    assert np.isfinite(higher['constant'])
    assert higher['constant'] > 0
