import numpy as np
import pytest
from numpy.testing import assert_allclose

from calculus import Field
from geometry import (LagrangianMap, GeometryCache, build_geometry, geometry_material_derivatives, cutoff_profile,
                      injectivity_radius, ReferenceDisk)
from utils.errors import DegenerateMap

B = np.array([[0.3, 0.1], [-0.2, -0.3]])


def _linear_map(disk, t):
    return LagrangianMap.from_function(disk, lambda y1, y2: (y1 + t * (B[0, 0] * y1 + B[0, 1] * y2),
                                                             y2 + t * (B[1, 0] * y1 + B[1, 1] * y2)))


def test_identity_map(disk):
    lagrangian_map = LagrangianMap.identity(disk)
    assert_allclose(lagrangian_map.det, 1, atol=1e-12)
    assert_allclose(lagrangian_map.jacobian, np.eye(2)[:, :, None, None] * np.ones(disk.shape), atol=1e-12)


def test_jacobian_times_inverse_is_identity(disk, ellipse_map):
    product = np.einsum('iaxy,ajxy->ijxy', ellipse_map.jacobian, ellipse_map.inverse_jacobian)
    assert_allclose(product, np.eye(2)[:, :, None, None] * np.ones(disk.shape), atol=1e-12)


def test_folded_map_is_refused(disk):
    with pytest.raises(DegenerateMap) as e:
        LagrangianMap.from_function(disk, lambda y1, y2: (-y1, y2))
    assert e.value.min_det < 0


def test_positions_must_match_grid(disk):
    with pytest.raises(ValueError):
        LagrangianMap(disk, np.zeros((2, 5, 5)))
    with pytest.raises(ValueError):
        build_geometry(LagrangianMap.identity(disk), disk=ReferenceDisk(9, 16))


def test_unit_disk_geometry(disk, cache):
    assert_allclose(cache.metric, np.eye(2)[:, :, None, None] * np.ones(disk.shape), atol=1e-12)
    assert_allclose(cache.normal, np.stack([np.cos(disk.theta), np.sin(disk.theta)]), atol=1e-12)
    assert_allclose(cache.curvature, 1, rtol=1e-12)
    assert_allclose(cache.mean_curvature, 1, rtol=1e-12)
    assert_allclose(cache.speed, 1, rtol=1e-12)
    assert cache.volume == pytest.approx(np.pi, rel=1e-13)
    assert cache.integrate_boundary(np.ones(disk.n_theta)) == pytest.approx(2 * np.pi, rel=1e-13)


def test_unit_disk_collar(cache):
    # normals of the unit circle turn by exactly the chord length, so the turn threshold 1 is met at chord 1
    assert cache.l1 == pytest.approx(1.0, rel=1e-8)
    assert cache.l0 == pytest.approx(0.5, rel=1e-8)
    assert cache.apriori_k == pytest.approx(3.0, rel=1e-8)
    assert cache.collar_width == pytest.approx(0.125, rel=1e-8)


def test_dilated_disk(disk):
    cache = GeometryCache(LagrangianMap.dilation(disk, 2.0))
    assert_allclose(cache.map.det, 4, rtol=1e-12)
    assert cache.volume == pytest.approx(4 * np.pi, rel=1e-12)
    assert_allclose(cache.curvature, 0.5, rtol=1e-12)
    assert cache.l1 == pytest.approx(2.0, rel=1e-8)
    assert cache.l0 == pytest.approx(1.0, rel=1e-8)


def test_rotation_keeps_the_metric(disk):
    cache = GeometryCache(LagrangianMap.rotation(disk, 0.7))
    assert_allclose(cache.metric, np.eye(2)[:, :, None, None] * np.ones(disk.shape), atol=1e-12)
    assert_allclose(cache.map.compose_rotation(-0.7).positions, disk.y, atol=1e-13)


def test_ellipse_geometry(disk, ellipse_cache):
    a = 1.2
    assert ellipse_cache.volume == pytest.approx(np.pi, rel=1e-12)
    # curvature of (a cos t, sin t / a) is 1 / (a^2 sin^2 t + cos^2 t / a^2)^(3/2)
    t = disk.theta
    expected = 1 / (a ** 2 * np.sin(t) ** 2 + np.cos(t) ** 2 / a ** 2) ** 1.5
    assert_allclose(ellipse_cache.curvature, expected, rtol=1e-10)
    assert_allclose(np.hypot(*ellipse_cache.normal), 1, rtol=1e-13)
    assert_allclose(np.einsum('it,it->t', ellipse_cache.normal, ellipse_cache.tangent), 0, atol=1e-13)


def test_collar_fields(cache):
    assert_allclose(cache.distance[0], 0)
    assert np.all(cache.distance >= 0)
    assert_allclose(cache.distance, 1 - cache.disk.mesh[0], atol=1e-10)
    assert_allclose(cache.cutoff[0], 1)
    # q = delta - N N on the boundary: the normal direction is annihilated
    qn = np.einsum('ijt,jt->it', cache.q[..., 0, :], cache.normal)
    assert_allclose(qn, 0, atol=1e-12)


def test_cutoff_profile():
    assert_allclose(cutoff_profile(np.array([0.0, 0.25, 0.5, 1.0])), [1, 1, 0, 0], atol=1e-15)
    assert cutoff_profile(0.375) == pytest.approx(0.5)


def test_injectivity_threshold_range(cache):
    with pytest.raises(ValueError):
        injectivity_radius(cache, eta_threshold=0)
    with pytest.raises(ValueError):
        injectivity_radius(cache, eta_threshold=2.5)


def test_material_derivatives_match_centered_differences(disk):
    cache = GeometryCache(LagrangianMap.identity(disk))
    v = np.einsum('ij,jxy->ixy', B, disk.y)
    derivatives = geometry_material_derivatives(cache, v)

    dt = 1e-3
    forward, backward = GeometryCache(_linear_map(disk, dt)), GeometryCache(_linear_map(disk, -dt))
    centered = (forward.metric - backward.metric) / (2 * dt)
    assert_allclose(derivatives.metric, centered, atol=1e-9)
    assert_allclose(derivatives.metric[:, :, 3, 5], B + B.T, atol=1e-11)

    centered_inverse = (forward.inverse_metric - backward.inverse_metric) / (2 * dt)
    assert_allclose(derivatives.inverse_metric, centered_inverse, atol=1e-5)
    assert_allclose(derivatives.volume_rate, np.trace(B), atol=1e-12)


def test_material_derivative_error_is_second_order(disk):
    cache = GeometryCache(LagrangianMap.identity(disk))
    v = np.einsum('ij,jxy->ixy', B, disk.y)
    exact = geometry_material_derivatives(cache, v).inverse_metric

    errors = []
    for dt in (1e-2, 5e-3):
        forward, backward = GeometryCache(_linear_map(disk, dt)), GeometryCache(_linear_map(disk, -dt))
        centered = (forward.inverse_metric - backward.inverse_metric) / (2 * dt)
        errors.append(np.abs(centered - exact).max())
    assert errors[0] / errors[1] == pytest.approx(4, rel=0.05)


def test_material_derivatives_accept_fields_and_arrays(ellipse_cache):
    v = np.einsum('ij,jxy->ixy', B, ellipse_cache.map.positions)
    from_array = geometry_material_derivatives(ellipse_cache, v)
    from_field = geometry_material_derivatives(ellipse_cache, Field(v, 1))
    assert_allclose(from_field.metric, from_array.metric)
    assert_allclose(from_field.inverse_metric, from_array.inverse_metric)
    assert_allclose(from_field.volume_rate, from_array.volume_rate)
