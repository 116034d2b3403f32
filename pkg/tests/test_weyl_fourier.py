import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicweil.dagger_series import Poly
from padicweil.numeric_core import pi_field, pi_valuation
from padicweil.oracle_sums import char_sum
from padicweil.sigma_nabla import RegimeError, make_dwork_module, trivial_module
from padicweil.weyl_fourier import (
    WeylOperator,
    act,
    buildinF_series,
    fourier_fiber,
    normal_form,
    notnaive_surjectivity_probe,
    prop_mult_coefficient,
    random_operator,
    random_probe_sample,
    rho,
    rho_closed_form,
    sign_substitution,
    weyl_mul,
)

F = pi_field(3)
X, D = WeylOperator.x(F), WeylOperator.d(F)
PINV = F.monomial(1, -1)


def op(terms):
    return WeylOperator(F, terms)


def test_normal_form_examples():
    assert normal_form(["d", "x"], F) == op({(1, 1): 1, (0, 0): PINV})
    assert normal_form(["d", "d", "x", "x"], F) == op({(2, 2): 1, (1, 1): PINV * 4, (0, 0): PINV * PINV * 2})
    assert normal_form(["x", "d"], F) == op({(1, 1): 1})


def test_weyl_mul_examples():
    assert weyl_mul(D, X) == op({(1, 1): 1, (0, 0): PINV})
    assert prop_mult_coefficient(D, X, 0, 0) == PINV and prop_mult_coefficient(D, X, 1, 1) == F.one()
    a = random_operator(F, random.Random(3))
    assert weyl_mul(a, WeylOperator.constant(F)) == a
    assert weyl_mul(WeylOperator.x(F, 2), WeylOperator.d(F, 2)) == op({(2, 2): 1})


def test_rho_examples():
    assert rho(X) == D and rho(D) == -X
    assert rho(weyl_mul(X, D)) == op({(1, 1): -1, (0, 0): -PINV})
    assert rho(weyl_mul(D, X) - weyl_mul(X, D)) == WeylOperator.constant(F, PINV)


ops = st.builds(lambda seed: random_operator(F, random.Random(seed)), st.integers(0, 10**6))


@settings(max_examples=60, deadline=None)
@given(ops, ops, ops)
def test_algebra_properties(a, b, c):
    assert weyl_mul(weyl_mul(a, b), c) == weyl_mul(a, weyl_mul(b, c))
    assert rho(weyl_mul(a, b)) == weyl_mul(rho(a), rho(b))
    assert rho(rho(a)) == sign_substitution(a)
    assert rho_closed_form(a) == rho(a)


def test_action_examples():
    M = make_dwork_module([0, 1], 3, 12)
    e = [Poly(F, [1])]
    assert act(D, M, e) == [Poly(F, [-1])]  # D e = -pi e
    v = [Poly(F, [2, 0, 1])]
    assert act(X, M, v) == [Poly(F, [0, 2, 0, 1])]
    comm = weyl_mul(D, X) - weyl_mul(X, D)
    assert act(comm, M, v) == [f * PINV for f in v]


@settings(max_examples=20, deadline=None)
@given(ops, ops, st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_action_is_module_action(a, b, coeffs):
    M = make_dwork_module([0, 0, 1], 3, 12)
    v = [Poly(F, coeffs)]
    assert act(weyl_mul(a, b), M, v) == act(a, M, act(b, M, v))


def test_buildinF_series():
    s = buildinF_series(3, 60)
    assert s.coeffs[0] == F.one() and s.coeffs[1] == -F.pi()
    assert min(pi_valuation(s.coeffs[i]) / i for i in range(10, 61)) >= Fraction(2, 9) - Fraction(1, 20)


def test_fourier_fibers():
    M = make_dwork_module([0, 0, 1], 3, 150)
    for a in range(3):
        rep = fourier_fiber(M, a)
        assert rep.dim == 1 and rep.weight_ok
        assert rep.charpoly.coeffs[1] == char_sum([0, a, 1], 3, 1)
    T = trivial_module(3, 30)
    assert fourier_fiber(T, 1).dim == 0 and fourier_fiber(T, 0).dim == 0
    with pytest.raises(RegimeError):
        fourier_fiber(T, [0, 1])


def test_probe_examples():
    M = make_dwork_module([0, 1], 3, 12)
    zero = [Poly(F)]
    r = notnaive_surjectivity_probe(M, [[Poly(F, [1, 1])]], 3)
    assert all(all(f.is_zero() for f in wi) for wi in r.w) and r.ok
    r = notnaive_surjectivity_probe(M, [zero, [Poly(F, [1])]], 1)
    assert r.w[0] == [Poly(F, [-PINV])] and r.residual_valuation == float("inf")


def test_probe_random_sample():
    rng = random.Random(5)
    M = make_dwork_module([0, 2, 1], 5, 15)
    v = random_probe_sample(M, rng, 6)
    assert notnaive_surjectivity_probe(M, v, 6).ok
