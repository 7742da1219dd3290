import numpy as np
import pytest
from numpy.testing import assert_allclose

from geometry import ReferenceDisk, chebyshev_differentiation


def test_chebyshev_differentiation_is_exact_on_cubics():
    x, d = chebyshev_differentiation(8)
    assert_allclose(d @ x ** 3, 3 * x ** 2, atol=1e-12)
    assert_allclose(d @ np.ones_like(x), 0, atol=1e-12)


@pytest.mark.parametrize('n_r, n_theta', [(8, 32), (17, 6), (17, 31)])
def test_rejects_small_or_odd_grids(n_r, n_theta):
    with pytest.raises(ValueError):
        ReferenceDisk(n_r, n_theta)


def test_grid_layout(disk):
    assert disk.shape == (17, 32)
    assert disk.r[0] == pytest.approx(1.0)
    assert np.all(np.diff(disk.r) < 0)
    assert disk.r[-1] > 0
    assert len(disk.mode_operators) == disk.n_theta // 2 + 1
    assert 0 < disk.min_spacing < 1 - disk.r[1] + 1e-15


def test_quadrature_weights(disk):
    assert disk.area_weights.sum() == pytest.approx(np.pi, rel=1e-13)
    assert disk.arc_weights.sum() == pytest.approx(2 * np.pi, rel=1e-13)

    rr, tt = disk.mesh
    assert disk.integrate(rr ** 2) == pytest.approx(np.pi / 2, rel=1e-12)
    assert disk.integrate((1 - rr ** 2) ** 2) == pytest.approx(np.pi / 3, rel=1e-12)
    assert disk.integrate(rr ** 2 * np.cos(2 * tt)) == pytest.approx(0, abs=1e-13)
    assert disk.integrate_boundary(np.cos(disk.theta) ** 2) == pytest.approx(np.pi, rel=1e-13)


def test_cartesian_derivatives(disk):
    x1, x2 = disk.y
    assert_allclose(disk.dy(x1 * x2), np.stack([x2, x1]), atol=1e-11)
    assert_allclose(disk.dy(x1 ** 3), np.stack([3 * x1 ** 2, np.zeros_like(x1)]), atol=1e-11)


def test_polar_derivatives_and_laplacian(disk):
    rr, tt = disk.mesh
    f = rr ** 2 * np.cos(2 * tt)
    assert_allclose(disk.dr(f), 2 * rr * np.cos(2 * tt), atol=1e-11)
    assert_allclose(disk.dtheta(f), -2 * rr ** 2 * np.sin(2 * tt), atol=1e-12)
    assert_allclose(disk.dtheta(f, order=2), -4 * f, atol=1e-12)
    assert_allclose(disk.laplacian(f), 0, atol=1e-10)
    assert_allclose(disk.laplacian(rr ** 4), 16 * rr ** 2, atol=1e-10)


def test_tensor_axes_pass_through(disk):
    x1, x2 = disk.y
    stacked = np.stack([x1, x2])
    assert disk.dy(stacked).shape == (2, 2) + disk.shape
    assert_allclose(disk.dy(stacked)[0, 0], 1, atol=1e-12)
    assert_allclose(disk.integrate(stacked ** 2), [np.pi / 4, np.pi / 4], rtol=1e-12)


def test_coefficients_of_low_modes(disk):
    rr, tt = disk.mesh
    c = disk.coefficients(rr * np.cos(tt))
    mag = np.abs(c)
    # r cos(theta): Chebyshev degree 1 in the radius, angular mode 1
    assert mag[1, 1] == pytest.approx(0.5, rel=1e-12)
    mag[1, 1] = 0
    assert mag.max() < 1e-13
    assert not disk.upper_third[1, 1]
    assert disk.upper_third[-1, 0]


def test_synthesize_inverts_coefficients(disk):
    f = np.random.default_rng(7).standard_normal((2,) + disk.shape)
    assert_allclose(disk.synthesize(disk.coefficients(f)), f, atol=1e-11)


def test_filter_keeps_resolved_fields(disk, bubble):
    rr, tt = disk.mesh
    assert_allclose(disk.smooth(bubble), bubble, atol=1e-12)
    assert_allclose(disk.smooth(disk.y), disk.y, atol=1e-12)
    assert_allclose(disk.smooth(rr ** 4 * np.cos(3 * tt)), rr ** 4 * np.cos(3 * tt), atol=1e-12)


def test_filter_removes_the_top_modes(disk):
    checkerboard = np.ones(disk.shape) * (-1.0) ** np.arange(disk.n_theta)
    assert np.abs(disk.smooth(checkerboard)).max() < 1e-12

    profile = disk.filter_profile()
    assert profile[0, 0] == 1
    assert profile[-1, 0] == pytest.approx(np.exp(-36))
    assert_allclose(disk.smooth(checkerboard, strength=0), checkerboard)
