import numpy as np
import pytest

from calculus import Field, spectral_sobolev_norm, tail_fraction, coefficient_scale, mixed_norms, MixedNormReport
from physics import LinearFamily, DerivedTimeFields
from simulation import SimState
from utils.errors import MissingDerivedFields


def test_sobolev_norms_grow_with_order(disk, bubble):
    norms = [spectral_sobolev_norm(disk, bubble, s) for s in range(4)]
    assert norms[0] > 0
    assert all(a < b for a, b in zip(norms, norms[1:]))
    assert spectral_sobolev_norm(disk, np.zeros(disk.shape), 3) == 0


def test_sobolev_norm_ignores_rounding_noise(disk, bubble):
    noisy = bubble + 1e-15 * np.random.default_rng(0).standard_normal(disk.shape)
    clean = spectral_sobolev_norm(disk, bubble, 5)
    assert spectral_sobolev_norm(disk, noisy, 5) == pytest.approx(clean, rel=1e-10)
    assert coefficient_scale(disk, bubble) == pytest.approx(0.5, rel=1e-12)


def test_tail_fraction_separates_smooth_from_rough(disk, bubble):
    fraction, total = tail_fraction(disk, bubble)
    assert fraction < 1e-12
    assert total > 0
    rough, _ = tail_fraction(disk, np.random.default_rng(1).standard_normal(disk.shape))
    assert rough > 0.3
    assert tail_fraction(disk, np.zeros(disk.shape)) == (0.0, 0.0)


def test_mixed_norms_need_derived_fields(disk, cache, bubble):
    state = SimState.initial(disk, LinearFamily(4.0), Field.zeros(disk, 1), bubble)
    with pytest.raises(MissingDerivedFields):
        mixed_norms(state, 1, None, cache)
    short = DerivedTimeFields([Field(bubble), Field.zeros(disk)], [Field.zeros(disk, 1)], 0)
    with pytest.raises(MissingDerivedFields):
        mixed_norms(state, 1, short, cache)


def test_mixed_norms_of_order_one(disk, cache, bubble):
    state = SimState.initial(disk, LinearFamily(4.0), Field.zeros(disk, 1), bubble)
    zero = Field.zeros(disk)
    derived = DerivedTimeFields([Field(bubble), zero, zero], [Field.zeros(disk, 1), Field.zeros(disk, 1)], 1)
    report = mixed_norms(state, 1, derived, cache)

    assert isinstance(report, MixedNormReport)
    # ||h||_{1,0} = ||d(1 - r^2)|| = sqrt(2 pi)
    assert report.h_r0 == pytest.approx(np.sqrt(2 * np.pi), rel=1e-10)
    assert report.h_r == pytest.approx(np.sqrt(2 * np.pi), rel=1e-10)
    assert report.v_r0 == 0
    # ||h||_{L2(boundary)} + ||dh||_{L2(boundary)} = 0 + 2 sqrt(2 pi)
    assert report.h_boundary == pytest.approx(2 * np.sqrt(2 * np.pi), rel=1e-10)
    # weak norm: ||h|| + ||dh|| = sqrt(pi / 3) + sqrt(2 pi)
    assert report.h_weak == pytest.approx(np.sqrt(np.pi / 3) + np.sqrt(2 * np.pi), rel=1e-10)
    assert report.as_dict()['order'] == 1
