from fractions import Fraction

import pytest

from padicweil.cohomology import (
    CharPoly,
    H1Presentation,
    IdentificationError,
    PrecisionError,
    SwanData,
    breaks_of,
    charpoly_precision,
    frobenius_on_h1,
    h1_reduce,
    h1c_via_duality,
    identify_charpoly,
    lefschetz_verify,
    lower_hull_slopes,
    newton_slopes,
    swan_predict,
    weight_check,
)
from padicweil.dagger_series import Poly
from padicweil.numeric_core import CycloElem, PiAdicApprox, embed_cyclo, pi_field
from padicweil.oracle_sums import char_sum
from padicweil.sigma_nabla import RegimeError, direct_sum, make_dwork_module, trivial_module


def Z(p, c):
    return CycloElem.rational(p, c)


@pytest.fixture(scope="module")
def gauss3():
    return make_dwork_module([0, 0, 1], 3, 150)


def test_reduce_x2_class(gauss3):
    F = pi_field(3)
    # nabla(x e) = (1 - 2 pi x^2) e dx, so x^2 e dx is 1/(2 pi) e dx
    assert h1_reduce(gauss3, 2) == [F.monomial(Fraction(1, 2), -1)]
    assert h1_reduce(gauss3, 0) == [F.one()]


def test_reduce_kills_exact_forms():
    M = make_dwork_module([0, 1, 0, 0, 1], 3, 12)
    pres = H1Presentation(M)
    F = M.field
    for f in ([1], [0, 0, 3], [2, -1, 0, 5, 1]):
        form = pres.nabla([Poly(F, f)])
        assert all(c.is_zero() for c in pres.reduce(form))


def test_basis_sizes():
    assert H1Presentation(make_dwork_module([0, 0, 0, 1], 5, 15)).basis == [(0, 0), (1, 0)]
    assert H1Presentation(trivial_module(3, 5)).dim == 0
    assert H1Presentation(make_dwork_module([0, 2], 3, 5)).dim == 0
    M = direct_sum(make_dwork_module([0, 0, 0, 1], 5, 15), make_dwork_module([0, 1, 1, 1], 5, 15))
    assert H1Presentation(M).dim == 4


def test_regime_errors():
    with pytest.raises(RegimeError):
        H1Presentation(make_dwork_module([0, 0, 0, 1], 3, 9))
    M = direct_sum(trivial_module(3, 6), make_dwork_module([0, 0, 1], 3, 6))
    with pytest.raises(RegimeError):
        H1Presentation(M)


def test_frobenius_gauss_p3(gauss3):
    res = frobenius_on_h1(gauss3)
    assert res.dim == 1
    S1 = char_sum([0, 0, 1], 3, 1)
    c1 = res.charpoly.coeffs[1]
    assert c1.known_mod >= 10
    assert c1.agrees(embed_cyclo(S1, c1.known_mod))


def test_two_truncations_agree():
    a = frobenius_on_h1(make_dwork_module([0, 0, 1], 3, 100)).charpoly.coeffs[1]
    b = frobenius_on_h1(make_dwork_module([0, 0, 1], 3, 160)).charpoly.coeffs[1]
    assert a.agrees(b)


def test_trivial_h1():
    res = frobenius_on_h1(trivial_module(3, 10))
    assert res.dim == 0 and res.charpoly.degree == 0


def test_precision_request():
    M = make_dwork_module([0, 0, 1], 3, 30)
    with pytest.raises(PrecisionError) as exc:
        frobenius_on_h1(M, m=50)
    assert exc.value.achieved < 50


def test_duality_and_pairing():
    for p in (3, 5):
        M = make_dwork_module([0, 0, 1], p, 50 * p)
        via = h1c_via_duality(M)
        direct = frobenius_on_h1(M).charpoly
        assert all(a.agrees(b, 8) for a, b in zip(via.coeffs, direct.coeffs))
        alpha, alpha_d = -char_sum([0, 0, 1], p, 1), -char_sum([0, 0, -1], p, 1)
        assert alpha * alpha_d == Z(p, p)
    with pytest.raises(RegimeError):
        h1c_via_duality(trivial_module(3, 10))


def test_direct_sum_charpoly_is_product():
    A, B = make_dwork_module([0, 0, 1], 5, 250), make_dwork_module([0, 1, 1], 5, 250)
    cp = frobenius_on_h1(direct_sum(A, B)).charpoly
    a, b = frobenius_on_h1(A).charpoly, frobenius_on_h1(B).charpoly
    assert cp.coeffs[1].agrees(a.coeffs[1] + b.coeffs[1], 8)
    assert cp.coeffs[2].agrees(a.coeffs[1] * b.coeffs[1], 8)


def test_swan_predict():
    r = swan_predict(SwanData({Fraction(0): 1}), 2, 3)
    assert r.swan.swan_total == 2 and r.dim_h1 == 1 and r.euler_characteristic == -1
    r = swan_predict(SwanData({Fraction(2): 2}), 3, 5)
    assert r.swan.swan_total == 6 and r.dim_h1 == 4
    assert swan_predict(SwanData({Fraction(0): 1}), 1, 3).dim_h1 == 0
    with pytest.raises(RegimeError):
        swan_predict(SwanData({Fraction(3): 1}), 3, 5)
    with pytest.raises(RegimeError):
        swan_predict(SwanData({Fraction(0): 1}), 3, 3)
    M = direct_sum(make_dwork_module([0, 0, 1], 5, 10), make_dwork_module([0, 1, 1], 5, 10))
    assert breaks_of(M).swan_total == 4


def test_lefschetz_examples(gauss3):
    rep = lefschetz_verify(gauss3, 2, 8)
    assert rep.ok
    assert rep.records[0].oracle == Z(3, 1) + CycloElem.zeta(3) * 2
    assert rep.records[1].oracle == Z(3, 3)
    assert (-rep.records[0].oracle) ** 2 == -rep.records[1].oracle
    triv = lefschetz_verify(trivial_module(3, 10), 3, 8)
    assert triv.ok and triv.h2c_rank == 1


def test_lefschetz_catches_wrong_sums(gauss3):
    wrong = [char_sum([0, 0, 1], 3, 1) + 3, char_sum([0, 0, 1], 3, 2)]
    rep = lefschetz_verify(gauss3, 2, 8, sums=wrong)
    assert rep.failing == [1]


def _exact(p, coeffs, q=None):
    return CharPoly([CycloElem.rational(p, c) if isinstance(c, int) else c for c in coeffs], p, q or p)


def test_newton_slopes_examples():
    F = pi_field(3)
    cp = CharPoly([PiAdicApprox.exact(F.one()), PiAdicApprox(F.pi(), 10)], 3, 3)
    assert newton_slopes(cp) == [Fraction(1, 2)]
    assert newton_slopes(_exact(3, [1, Z(3, 1) + CycloElem.zeta(3) * 2])) == [Fraction(1, 2)]
    assert newton_slopes(_exact(3, [1, -3])) == [1]
    assert lower_hull_slopes([(0, 0), (1, 2), (2, 1)]) == [Fraction(1, 2), Fraction(1, 2)]
    weak = CharPoly([PiAdicApprox.exact(F.one()), PiAdicApprox(F.zero(), Fraction(1, 4)),
                     PiAdicApprox.exact(F(3))], 3, 3)
    with pytest.raises(PrecisionError):
        newton_slopes(weak)


def test_weight_check_examples():
    g = Z(3, 1) + CycloElem.zeta(3) * 2
    assert weight_check(_exact(3, [1, g]), 1, 1e-9).passed
    assert weight_check(_exact(3, [1, -3]), 2).passed
    mixed = _exact(3, [1, -4, 3])  # (1 - t)(1 - 3t)
    assert not weight_check(mixed, 0).passed and not weight_check(mixed, 2).passed


def test_tate_twist_shifts():
    cp = _exact(5, [1, char_sum([0, 0, 1], 5, 1)])
    tw = cp.twisted(1)
    assert newton_slopes(tw) == [s + 1 for s in newton_slopes(cp)]
    assert weight_check(tw, 3).passed and not weight_check(tw, 1).passed


def test_identify(gauss3):
    cp = frobenius_on_h1(gauss3).charpoly
    S1 = char_sum([0, 0, 1], 3, 1)
    exact, disc = identify_charpoly(cp, [Z(3, 1), S1])
    assert exact.exact and disc >= 8
    with pytest.raises(IdentificationError):
        identify_charpoly(cp, [Z(3, 1), S1 + 1])
    assert charpoly_precision(cp) >= 10
