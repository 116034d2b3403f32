import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from padicweil.numeric_core import (
    INF,
    CycloElem,
    FiniteField,
    PiAdicApprox,
    complex_embeddings,
    conway_free_modulus,
    embed_cyclo,
    ff_trace,
    hensel_zeta_p,
    pi_field,
    pi_valuation,
    vp_factorial,
)

PRIMES = [3, 5, 7]


def elems(p, max_pow=3):
    F = pi_field(p)
    coord = st.fractions(min_value=-50, max_value=50, max_denominator=20)
    return st.builds(lambda cs, k: F.from_coords(cs).shift(k),
                     st.lists(coord, min_size=p - 1, max_size=p - 1), st.integers(-max_pow, max_pow))


def test_pi_valuation_examples():
    F = pi_field(3)
    assert pi_valuation(F.pi()) == Fraction(1, 2)
    assert pi_valuation(F(3)) == 1
    assert pi_valuation(F.pi() ** 3 / 3) == Fraction(1, 2)
    assert pi_valuation(F.zero()) == INF


def test_pi_relation():
    for p in PRIMES:
        F = pi_field(p)
        assert F.pi() ** (p - 1) == F(-p)
        assert F.monomial(1, -1) * F.pi() == F.one()


@pytest.mark.parametrize("p", PRIMES)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms(p, data):
    a, b, c = (data.draw(elems(p)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == pi_field(p).one()


@pytest.mark.parametrize("p", PRIMES)
@settings(max_examples=500, deadline=None)
@given(data=st.data())
def test_valuation_additive(p, data):
    a, b = data.draw(elems(p)), data.draw(elems(p))
    assert pi_valuation(a * b) == pi_valuation(a) + pi_valuation(b)
    va, vb = pi_valuation(a), pi_valuation(b)
    assert pi_valuation(a + b) >= min(va, vb)
    if va != vb:
        assert pi_valuation(a + b) == min(va, vb)


def test_approx_reduction_and_agreement():
    F = pi_field(3)
    x = PiAdicApprox(F(1) + F(81), 3)
    assert x.value == F(1)
    assert x.agrees(PiAdicApprox.exact(F(1)))
    y = PiAdicApprox(F.pi(), 2) * PiAdicApprox(F(3), 2)
    assert y.known_mod == Fraction(5, 2)
    with pytest.raises(ArithmeticError):
        PiAdicApprox(F(1), 1).divide(PiAdicApprox(F(9), 1))


def test_hensel_zeta():
    for p in [3, 5, 7, 11]:
        F = pi_field(p)
        z = hensel_zeta_p(F, 8)
        assert (z ** p - 1).valuation() >= 8
        assert (z - (1 + F.pi())).valuation() >= Fraction(2, p - 1)
    z = hensel_zeta_p(pi_field(3), 1)
    assert z.agrees(PiAdicApprox.exact(1 + pi_field(3).pi()), Fraction(1))
    assert hensel_zeta_p(pi_field(2), 5).value == pi_field(2)(-1)


def test_embed_cyclo_examples():
    one = CycloElem.rational(3, 1)
    assert embed_cyclo(one, 5).value == pi_field(3).one()
    s = one + CycloElem.zeta(3) + CycloElem.zeta(3, 2)
    assert s.is_zero()
    g = one + CycloElem.zeta(3) * 2
    assert embed_cyclo(g, 6).valuation() == Fraction(1, 2)
    assert g.valuation() == Fraction(1, 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=4, max_size=4), st.lists(st.integers(-9, 9), min_size=4, max_size=4))
def test_embed_is_homomorphism(a, b):
    x, y = CycloElem(5, a), CycloElem(5, b)
    m = 8
    lhs = embed_cyclo(x * y, m)
    rhs = embed_cyclo(x, m) * embed_cyclo(y, m)
    assert lhs.agrees(rhs, min(m, rhs.known_mod))
    assert embed_cyclo(x + y, m).agrees(embed_cyclo(x, m) + embed_cyclo(y, m))


def test_complex_embeddings():
    g = CycloElem.rational(3, 1) + CycloElem.zeta(3) * 2
    vals = complex_embeddings(g)
    assert all(abs(abs(v) - math.sqrt(3)) < 1e-12 for v in vals)
    assert sorted(v.imag for v in vals) == pytest.approx([-math.sqrt(3), math.sqrt(3)])
    assert all(v == pytest.approx(7) for v in complex_embeddings(CycloElem.rational(7, 7)))
    assert all(abs(abs(v) - 1) < 1e-12 for v in complex_embeddings(CycloElem.zeta(7)))
    assert len(complex_embeddings(CycloElem.zeta(7))) == 6


def test_cyclo_valuation_matches_embedding():
    for coords in ([1, 2, 0, 0], [5, 0, 0, 0], [0, 1, -1, 0], [3, 3, 1, 2]):
        x = CycloElem(5, coords)
        assert x.valuation() == embed_cyclo(x, 10).valuation()


def test_finite_fields():
    assert conway_free_modulus(3, 2) == (1, 0, 1)
    F = FiniteField(3, 2)
    assert len(list(F.elements())) == 9
    g = F.gen()
    # trace of a root of x^2 + 1 is minus the x-coefficient
    assert ff_trace(g) == 0
    for x in F.elements():
        assert ff_trace(x.frobenius()) == ff_trace(x)
    for a in range(5):
        assert ff_trace(FiniteField(5, 1)(a)) == a


def test_factorial_bounds():
    for p in [2, 3, 5, 7, 11, 13]:
        for n in range(201):
            v = vp_factorial(n, p)
            assert Fraction(n, p - 1) >= v >= Fraction(n, p - 1) - math.ceil(math.log(n + 1, p) - 1e-12)
