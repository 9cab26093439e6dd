import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from caputo_sobolev import GridFunction
from caputo_sobolev import norm_lab as nl
from caputo_sobolev import time_basis as tb


def test_report_invariants():
    r = nl.verify_forward(nl.eigen_family(N=512), 0.5, 64, "eigen")
    assert r.spread >= 1.0 and np.all(r.ratios > 0)
    assert r.ratio_min == r.ratios.min() and r.ratio_max == r.ratios.max()


def test_eigen_family_spread_bound():
    assert nl.verify_forward(nl.eigen_family(), 0.5, name="eigen").spread <= 20


@given(c=st.floats(1e-3, 1e3))
def test_forward_homogeneity(c):
    base = nl.trig_family(N=256, count=3)
    r1 = nl.verify_forward(base, 0.3, 32)
    r2 = nl.verify_forward([u * c for u in base], 0.3, 32)
    np.testing.assert_allclose(r1.ratios, r2.ratios, rtol=1e-12)


def test_inverse_homogeneity_and_singleton():
    _, psi = tb.eigenpair(1, 1.0, 512)
    r = nl.verify_inverse([psi, psi * 3.0, psi * 0.01], 0.75, 64)
    np.testing.assert_allclose(r.ratios, r.ratios[0], rtol=1e-12)
    single = nl.verify_inverse([psi], 0.25, 64)
    assert single.ratios.size == 1 and single.spread == 1.0


def test_noise_family_positive():
    rng = np.random.default_rng(5)
    fam = [GridFunction(1.0, np.r_[0.0, rng.standard_normal(512)]) for _ in range(4)]
    r = nl.verify_forward(fam, 0.4, 64)
    assert np.all(np.isfinite(r.ratios)) and np.all(r.ratios > 0)


def test_inverse_excludes_out_of_range_members():
    fam = [GridFunction(1.0, np.ones(513)), tb.eigenpair(2, 1.0, 512)[1]]
    r = nl.verify_inverse(fam, 0.75, 64)
    assert r.indices == (1,) and r.excluded[0][0] == 0


def test_inverse_half_notes():
    r = nl.verify_inverse(nl.eigen_family(N=512, count=3), 0.5, 64)
    assert len(r.notes) == 3


def test_empty_and_zero_families():
    with pytest.raises(nl.FamilyError):
        nl.verify_forward([], 0.5)
    with pytest.raises(nl.FamilyError):
        nl.verify_forward([GridFunction(1.0, np.zeros(257))], 0.5)
    with pytest.raises(nl.FamilyError, match="no admissible"):
        nl.verify_inverse([GridFunction(1.0, np.ones(257))], 0.75, 32)


def test_unknown_family():
    with pytest.raises(nl.FamilyError):
        nl.standard_family("noise", 0.5)


def test_trig_family_reproducible():
    a = nl.trig_family(N=64, seed=7)
    b = nl.trig_family(N=64, seed=7)
    c = nl.trig_family(N=64, seed=8)
    assert all(x == y for x, y in zip(a, b)) and a[0] != c[0]


@pytest.mark.parametrize("name", nl.FAMILIES)
def test_two_sided(name):
    fam = nl.standard_family(name, 0.25, N=512)
    for verify in (nl.verify_forward, nl.verify_inverse):
        r = verify(fam, 0.25, 64, name)
        assert 1e-6 < r.ratio_min and r.ratio_max < 1e6


def test_stability_under_mode_doubling():
    fam = nl.eigen_family()
    s64 = nl.verify_forward(fam, 0.5, 64).spread
    s128 = nl.verify_forward(fam, 0.5, 128).spread
    assert abs(s128 / s64 - 1) < 0.01
