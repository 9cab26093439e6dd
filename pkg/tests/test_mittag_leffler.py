import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from caputo_sobolev.mittag_leffler import (
    TAYLOR_RADIUS,
    MittagLefflerError,
    MLQuery,
    gamma,
    ml,
    ml_array,
    ml_kernel,
)

from oracles import ml_series


def test_exponential_at_one():
    r = ml(MLQuery(1.0, 1.0, 1.0))
    assert r.value == pytest.approx(math.e, abs=1e-15)
    assert r.regime == "taylor_series"
    assert r.est_abs_error <= 1e-12


def test_zero_argument_is_reciprocal_gamma():
    assert ml(0.7, 0.7, 0.0).value == pytest.approx(1 / math.gamma(0.7), rel=1e-15)


def test_cos_identity_at_minus_four():
    exact = sum(
        mp.mpf(-4) ** k / mp.factorial(2 * k) for k in range(50)
    )  # 50-term rational series of cos(2)
    assert ml(2.0, 1.0, -4.0).value == pytest.approx(float(exact), abs=1e-13)
    assert float(exact) == pytest.approx(math.cos(2.0), abs=1e-15)


def test_half_order_against_series_oracle():
    r = ml(0.5, 0.5, -1.0)
    assert r.value == pytest.approx(ml_series(0.5, 0.5, -1.0), abs=1e-13)
    # closed form: E_{1/2,1/2}(z) = 1/sqrt(pi) + z exp(z^2) erfc(-z)
    closed = 1 / math.sqrt(math.pi) - math.e * math.erfc(1.0)
    assert r.value == pytest.approx(closed, abs=1e-14)


# lattice points where the series oracle stays below ~200 digits
NEG_CASES = [
    (a, z)
    for a in (0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.5, 2.0)
    for z in (-50.0, -20.0, -6.0, -3.0, -0.5)
    if abs(z) ** (1 / a) <= 400
]


@pytest.mark.parametrize("alpha,z", NEG_CASES)
def test_negative_axis_against_oracle(alpha, z):
    beta = 1.0
    r = ml(alpha, beta, z)
    ref = ml_series(alpha, beta, z)
    tol = 1e-12 if abs(z) <= TAYLOR_RADIUS else 1e-9
    assert abs(r.value - ref) <= tol
    assert r.est_abs_error <= tol


@pytest.mark.parametrize("alpha,beta", [(0.3, 0.3), (0.6, 1.4), (1.3, 0.8), (0.5, 2.5)])
@pytest.mark.parametrize("z", [0.5, 3.0, 6.0])
def test_positive_axis_against_oracle(alpha, beta, z):
    ref = ml_series(alpha, beta, z)
    # values reach 1e172 here; terms are formed from log-gamma so a few ulps per term accumulate
    assert ml(alpha, beta, z).value == pytest.approx(ref, rel=1e-11)


@given(
    alpha=st.floats(0.3, 2.0),
    beta=st.floats(0.05, 3.0),
    z=st.floats(-2.0, 2.0),
)
def test_series_consistency_small_z(alpha, beta, z):
    # direct 200-term sum in extended precision; below alpha = 0.3 two hundred
    # terms no longer reach the converged tail for |z| near 2
    with mp.workdps(40):
        a, b = mp.mpf(alpha), mp.mpf(beta)
        s = mp.fsum(mp.mpf(z) ** k * mp.rgamma(a * k + b) for k in range(200))
    # absolute below one, relative above (one ulp of 1e5 is already 1.5e-11)
    assert abs(ml(alpha, beta, z).value - float(s)) <= 1e-12 * max(1.0, abs(float(s)))


@given(
    alpha=st.floats(0.1, 2.0),
    beta=st.floats(0.1, 2.0),
    z=st.floats(-40.0, 5.0),
)
def test_recurrence(alpha, beta, z):
    # keep away from the positive-axis overflow guard
    assume(z <= 0 or math.log(z) / alpha < math.log(600.0))
    lhs = ml(alpha, beta, z).value
    rhs = z * ml(alpha, alpha + beta, z).value + 1.0 / gamma(beta)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@pytest.mark.parametrize("x", np.linspace(0.0, 10.0, 41))
def test_special_cases(x):
    assert ml(1.0, 1.0, x).value == pytest.approx(math.exp(x), rel=1e-10)
    assert abs(ml(2.0, 1.0, -x * x).value - math.cos(x)) <= 1e-10
    sinc = math.sin(x) / x if x else 1.0
    assert abs(ml(2.0, 2.0, -x * x).value - sinc) <= 1e-10


def test_vectorised_matches_scalar():
    z = np.r_[-1e4, -300.0, -7.5, -1.0, 0.0, 0.3, 4.0]
    for alpha, beta in [(0.4, 0.4), (0.9, 1.0), (2.0, 1.5), (1.5, 1.5)]:
        vec = ml_array(alpha, beta, z)
        ref = [ml(alpha, beta, v).value for v in z]
        np.testing.assert_allclose(vec, ref, rtol=1e-9, atol=1e-12)


def test_vectorised_large_alpha_two():
    x = np.linspace(1.0, 400.0, 9000)
    np.testing.assert_allclose(ml_array(2.0, 1.0, -x * x), np.cos(x), atol=1e-10)


def test_large_negative_asymptotics():
    # E_{a,b}(z) ~ -z^{-1}/gamma(b - a) for z -> -inf, 0 < a < 1
    z = -1e6
    v = ml(0.6, 1.0, z).value
    lead = -1 / (z * math.gamma(0.4)) + 1 / (z * z * math.gamma(-0.2))
    assert v == pytest.approx(lead, rel=1e-9)


@given(alpha=st.floats(0.02, 0.3), z=st.floats(-2.0, 1.0))
def test_small_order_series_terminates(alpha, z):
    if z > 0 and math.log(z) / alpha > math.log(700.0):
        return
    r = ml(alpha, 1.0, z)
    assert r.est_abs_error <= 1e-9 * max(1.0, abs(r.value))
    if z > 0 or abs(z) ** (1 / alpha) <= 400:
        assert r.value == pytest.approx(ml_series(alpha, 1.0, z), rel=1e-11, abs=1e-12)


def test_deterministic():
    assert ml(0.37, 1.2, -17.3) == ml(0.37, 1.2, -17.3)


@pytest.mark.parametrize(
    "args, code",
    [
        ((0.0, 1.0, 1.0), "invalid-order"),
        ((0.5, -1.0, 1.0), "invalid-order"),
        ((0.5, 1.0, float("nan")), "out-of-range"),
        ((0.5, 1.0, -1e9), "out-of-range"),
        ((0.5, 1.0, 1e4), "out-of-range"),
    ],
)
def test_errors(args, code):
    with pytest.raises(MittagLefflerError, match=code):
        ml(*args)


class TestKernel:
    def test_exponential(self):
        t = np.linspace(0.1, 3.0, 7)
        np.testing.assert_allclose(ml_kernel(1.0, 2.5, t), np.exp(-2.5 * t), rtol=1e-12, atol=1e-15)

    def test_zero_mu(self):
        assert ml_kernel(0.5, 0.0, 4.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)

    def test_oracle_point(self):
        ref = 0.7 ** (-0.7) * ml_series(0.3, 0.3, -2 * 0.7**0.3)
        assert ml_kernel(0.3, 2.0, 0.7) == pytest.approx(ref, rel=1e-12)

    @given(alpha=st.floats(0.05, 0.99), mu=st.floats(0.0, 1e4), t=st.floats(1e-6, 10.0))
    def test_positive(self, alpha, mu, t):
        assert ml_kernel(alpha, mu, t) > 0

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError, match="nonpositive"):
            ml_kernel(0.5, 1.0, 0.0)
