from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicweil.dagger_series import (
    LaurentFragment,
    Poly,
    TruncatedSeries,
    TruncationError,
    dwork_slope,
    exp_poly,
    exp_poly_naive,
    frobenius_substitute,
    gauss_valuation,
    splitting_series,
    w_r,
)
from padicweil.numeric_core import PiAdicApprox, hensel_zeta_p, pi_field, pi_valuation


def test_exp_small_example():
    F = pi_field(3)
    f = Poly(F, [0, 1, 0, -1]) * F.pi()
    E = exp_poly(f, 3)
    assert E.coeffs == (F(1), F.pi(), F(Fraction(-3, 2)), F.pi() * Fraction(-3, 2))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.sampled_from([3, 5]))
def test_exp_recurrence_matches_naive(coeffs, p):
    F = pi_field(p)
    f = Poly(F, [0] + coeffs) * F.pi()
    assert exp_poly(f, 12) == exp_poly_naive(f, 12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_exp_multiplicative(a, b):
    F = pi_field(3)
    f, g = Poly(F, [0] + a) * F.pi(), Poly(F, [0] + b) * F.pi()
    assert exp_poly(f + g, 15) == exp_poly(f, 15) * exp_poly(g, 15)


def test_exp_needs_zero_constant():
    F = pi_field(3)
    with pytest.raises(ValueError):
        exp_poly(Poly(F, [1, 1]), 4)


def test_splitting_series_slope_and_value():
    for p in [3, 5]:
        s = splitting_series(p, 60)
        assert s.measured_slope(10, 60) >= Fraction(p - 1, p * p) - Fraction(1, 20)
        assert s.measured_slope(1, 60) >= dwork_slope(p, p, 1)
        val = s.evaluate(PiAdicApprox.exact(pi_field(p).one()))
        assert val.agrees(hensel_zeta_p(pi_field(p), 6), 6)


def test_product_certificate_is_sound():
    F = pi_field(3)
    a = splitting_series(3, 40)
    b = splitting_series(3, 40, sign=-1)
    prod = a * b  # exp(0) = 1
    assert prod.coeffs[0] == F.one() and all(c.is_zero() for c in prod.coeffs[1:])
    full = splitting_series(3, 80)
    for i in range(41, 81):
        assert pi_valuation(full.coeffs[i]) >= a.tail_bound(i)


def test_frobenius_substitute():
    F = pi_field(3)
    s = splitting_series(3, 10)
    t = frobenius_substitute(s, 3)
    assert t.trunc_order == 32
    assert t.coeffs[3] == s.coeffs[1] and t.coeffs[4].is_zero()
    assert t.tail_slope == s.tail_slope / 3
    big = TruncatedSeries(F, [1], 10**5)
    with pytest.raises(TruncationError):
        frobenius_substitute(big, 3)


def test_evaluate_without_certificate_refuses():
    F = pi_field(3)
    s = TruncatedSeries(F, [1, 1, 1], 2)
    with pytest.raises(TruncationError):
        s.evaluate(PiAdicApprox.exact(F.one()))


def test_truncate_cannot_extend():
    s = splitting_series(3, 10)
    assert s.truncate(5).trunc_order == 5
    with pytest.raises(TruncationError):
        s.truncate(11)


def test_w_r_and_gauss():
    F = pi_field(3)
    x = LaurentFragment(F, {-2: F(9), 0: F(1), 3: F.pi()})
    assert w_r(x, 1) == min(2 - 2, 0, Fraction(1, 2) + 3)
    with pytest.raises(ValueError):
        w_r(x, 0)
    s = splitting_series(3, 30)
    assert gauss_valuation(s, Fraction(1, 10)) == 0
    y = LaurentFragment(F, {1: F(3)})
    assert w_r(x * y, Fraction(1, 3)) == w_r(x, Fraction(1, 3)) + w_r(y, Fraction(1, 3))
