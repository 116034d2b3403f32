import pytest
from hypothesis import given, settings, strategies as st

from padicweil.numeric_core import CycloElem, FiniteField
from padicweil.oracle_sums import (
    BudgetError,
    OracleInconsistency,
    char_sum,
    char_sum_naive,
    l_poly_degree,
    l_poly_from_sums,
    log_series_to_poly,
    module_sum_series,
    power_sums_from_poly,
    sum_series,
)


def Z(p, c):
    return CycloElem.rational(p, c)


def test_gauss_sum_p3():
    S1 = char_sum([0, 0, 1], 3, 1)
    assert S1 == Z(3, 1) + CycloElem.zeta(3) * 2
    assert char_sum([0, 0, 1], 3, 2) == Z(3, 3)
    assert char_sum([0], 3, 2) == Z(3, 9)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.sampled_from([(3, 1), (3, 2), (5, 1), (5, 2), (7, 1)]))
def test_vectorized_matches_naive(P, pn):
    p, n = pn
    assert char_sum(P, p, n) == char_sum_naive(P, p, n)


def test_gauss_sum_norm():
    for p in [3, 5, 7, 11, 13]:
        g = char_sum([0, 0, 1], p, 1)
        assert g * g.conjugate() == Z(p, p)


def test_l_polynomials():
    L = l_poly_from_sums(module_sum_series([[0, 0, 1]], 3, 3), 1, 3)
    assert L.coeffs == [Z(3, 1), Z(3, 1) + CycloElem.zeta(3) * 2]
    L = l_poly_from_sums(module_sum_series([[0, 1, 0, 1]], 5, 4), 2, 5)
    assert L.degree == 2 and L.coeffs[2] == Z(5, 5)


def test_inconsistency_detected():
    sums = module_sum_series([[0, 0, 1]], 3, 3)
    bad = list(sums)
    bad[2] = bad[2] + 1
    with pytest.raises(OracleInconsistency) as exc:
        l_poly_from_sums(bad, 1, 3)
    assert exc.value.order >= 2


def test_h2_factor_for_trivial():
    sums = module_sum_series([[0]], 3, 4)
    L = l_poly_from_sums(sums, 0, 3, h2_factor=[1, -3])
    assert L.coeffs == [Z(3, 1)] and L.h_degrees == {1: 0, 2: 1}


def test_newton_identities_round_trip():
    sums = module_sum_series([[0, 1, 0, 0, 1]], 3, 5)
    ell = log_series_to_poly(sums, 5, 3)
    back = [-t for t in power_sums_from_poly(ell[:4], 5, Z(3, 0))]
    assert back == sums
    assert l_poly_degree(sums, 3) == 3


def test_extension_base_field():
    F25 = FiniteField(5, 2)
    sums = [char_sum([[0], [0, 1], [0], [1]], 5, n, base_degree=2) for n in (1, 2, 3)]
    L = l_poly_from_sums(sums, 2, 5, q=25)
    assert [c.coords[0] for c in L.coeffs] == [1, -5, 25]
    assert char_sum([[0], F25.gen(), [0], [1]], 5, 1, base_degree=2) == sums[0]


def test_budget():
    with pytest.raises(BudgetError):
        char_sum([0, 1], 13, 7)


def test_sum_series_container():
    s = sum_series([0, 0, 1], 3, 2)
    assert s.q == 3 and len(s.values) == 2
