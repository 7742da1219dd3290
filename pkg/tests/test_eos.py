import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from physics import (EosFamily, LinearFamily, TabulatedFamily, IncompressibleMember, default_family,
                     verify_structural_conditions)
from utils.errors import NonpositiveKappa, DegenerateEos, ConfigError

H = np.linspace(-0.8, 0.8, 9)


def _linear_table(kappa, h=np.linspace(-1, 1, 41)):
    table = {'h': h, 'e0': h / kappa, 'e1': np.full(h.shape, 1 / kappa)}
    table.update({f'e{k}': np.zeros(h.shape) for k in range(2, 7)})
    return pd.DataFrame(table)


def test_linear_family_closed_forms():
    eos = LinearFamily(4.0)
    assert eos.density(0.0) == 1
    assert eos.density(4 * np.log(2)) == pytest.approx(2.0)
    assert_allclose(eos.derivative(1, H), 0.25)
    assert_allclose(eos.derivative(3, H), 0)
    assert_allclose(eos.pressure(H), 4 * np.expm1(H / 4))
    assert_allclose(eos.enthalpy_from_density(eos.density(H)), H, atol=1e-14)
    assert eos.is_linear
    assert eos.inverse_kappa == 0.25


def test_quadrature_matches_linear_closed_forms():
    eos = LinearFamily(2.0)
    assert_allclose(EosFamily.pressure(eos, H), eos.pressure(H), rtol=1e-13, atol=1e-15)
    assert_allclose(EosFamily.internal_energy_density(eos, H), eos.internal_energy_density(H), atol=1e-13)


def test_internal_energy_is_quadratic_near_rest():
    eos = LinearFamily(100.0)
    # rho Q(rho) = h^2 / (2 kappa) + O(h^3 / kappa^2)
    assert eos.internal_energy_density(0.1) == pytest.approx(0.01 / 200, rel=1e-3)
    assert eos.internal_energy_density(0.0) == 0


def test_default_family():
    assert isinstance(default_family(10.0), LinearFamily)
    member = default_family(np.inf)
    assert isinstance(member, IncompressibleMember)
    assert member.incompressible
    assert member.inverse_kappa == 0.0
    assert_allclose(member.pressure(H), H)
    assert_allclose(member.density(H), 1)
    for kappa in (0.0, -1.0):
        with pytest.raises(NonpositiveKappa):
            default_family(kappa)


def test_incompressible_member_has_no_inverse():
    with pytest.raises(DegenerateEos):
        IncompressibleMember().enthalpy_from_density(1.0)


@pytest.mark.parametrize('kappa, c0, passed, worst', [
    (100.0, 1.0, True, 0.1),
    (0.25, 1.0, False, 4.0),
    (4.0, 0.5, True, 1.0),
    # c0 > 1: |e'| <= c0 decides, so kappa >= 1 / c0 rather than 1 / c0^2
    (0.5, 2.0, True, 1.0),
    (0.3, 2.0, False, 1 / 0.6),
])
def test_structural_conditions_of_the_linear_family(kappa, c0, passed, worst):
    report = verify_structural_conditions(LinearFamily(kappa), c0, (-1.0, 1.0))
    assert report.passed is passed
    assert report.worst_ratio == pytest.approx(worst, rel=1e-12)
    assert report.worst_order == 1


def test_structural_report_separates_the_two_bounds():
    report = verify_structural_conditions(LinearFamily(0.25), 1.0, (-1.0, 1.0))
    # |e'| <= c0 fails by 4, |e'| <= c0 sqrt(e') by 1 / sqrt(kappa) = 2
    assert report.bound_ratio == pytest.approx(4.0)
    assert report.sqrt_ratio == pytest.approx(2.0)


def test_structural_conditions_just_below_the_threshold():
    assert not verify_structural_conditions(LinearFamily(3.9), 0.5, (-1.0, 1.0)).passed


def test_tabulated_family_reproduces_the_linear_member():
    eos = TabulatedFamily(2.0, _linear_table(2.0))
    linear = LinearFamily(2.0)
    assert_allclose(eos.e(H), linear.e(H), atol=1e-14)
    assert_allclose(eos.derivative(1, H), 0.5)
    assert_allclose(eos.pressure(H), linear.pressure(H), rtol=1e-12)
    assert_allclose(eos.enthalpy_from_density(eos.density(H)), H, atol=1e-12)
    assert eos.is_linear
    assert eos.name == 'custom'


def test_tabulated_family_from_csv(tmp_path):
    path = tmp_path / 'eos.csv'
    with open(path, 'w') as f:
        f.write('# linear member, kappa = 2\n')
        _linear_table(2.0).to_csv(f, index=False)
    eos = TabulatedFamily.from_csv(2.0, path)
    assert eos.e(1.0) == pytest.approx(0.5)


def test_tabulated_family_validation():
    table = _linear_table(2.0)
    with pytest.raises(ConfigError):
        TabulatedFamily(2.0, table.drop(columns=['e6']))
    with pytest.raises(ConfigError):
        TabulatedFamily(2.0, table.assign(e0=np.zeros(len(table))))
    with pytest.raises(ConfigError):
        TabulatedFamily(2.0, table.assign(e0=table['e0'] + 0.1))
    with pytest.raises(ConfigError):
        TabulatedFamily(2.0, _linear_table(2.0, h=np.linspace(0.1, 1, 10)))
    with pytest.raises(NonpositiveKappa):
        TabulatedFamily(0.0, table)


def test_nonlinear_table_is_not_linear():
    h = np.linspace(-1, 1, 41)
    table = pd.DataFrame({'h': h, 'e0': np.log1p(h / 2), 'e1': 1 / (2 + h), 'e2': -1 / (2 + h) ** 2,
                          'e3': 2 / (2 + h) ** 3, 'e4': -6 / (2 + h) ** 4, 'e5': 24 / (2 + h) ** 5,
                          'e6': -120 / (2 + h) ** 6})
    assert not TabulatedFamily(2.0, table).is_linear
