import random

import pytest

from padicweil.dagger_series import Poly, TruncatedSeries, TruncationError
from padicweil.numeric_core import CycloElem, FiniteField, embed_cyclo, pi_field
from padicweil.sigma_nabla import (
    DworkTwist,
    RegimeError,
    check_compatibility,
    direct_sum,
    dual,
    fiber_frobenius,
    horizontal_basis,
    horizontal_residual,
    make_dwork_module,
    mat_det,
    mat_inv,
    mat_mul,
    charpoly_one_minus,
    tate_twist,
    tensor,
    trivial_module,
    with_frobenius,
)


@pytest.mark.parametrize("P", [[0, 1], [0, 0, 1], [0, 1, 0, 0, 1], [0]])
def test_compatibility_of_dwork_modules(P):
    M = make_dwork_module(P, 3, 40)
    assert check_compatibility(M).ok


def test_connection_sign():
    F = pi_field(3)
    M = make_dwork_module([0, 0, 1], 3, 20)
    assert M.connection[0][0] == Poly(F, [0, -2]) * F.pi()


def test_perturbed_frobenius_fails():
    M = make_dwork_module([0, 1], 3, 30)
    s = M.frobenius[0][0]
    bump = TruncatedSeries(pi_field(3), [0, 1], s.trunc_order, tail_slope=s.tail_slope)
    bad = with_frobenius(M, [[s + bump]])
    rep = check_compatibility(bad)
    assert not rep.ok and rep.failing_entry == (0, 0, 0)


def test_tensor_dual_sum_compatible():
    A, B = make_dwork_module([0, 1], 3, 30), make_dwork_module([0, 0, 1], 3, 30)
    for M in (tensor(A, B), dual(B), direct_sum(A, B), tensor(B, dual(B)), tate_twist(A, 1)):
        assert check_compatibility(M).ok


def test_tensor_matches_sum_of_twists():
    A, B = make_dwork_module([0, 1], 3, 30), make_dwork_module([0, 0, 1], 3, 30)
    C = make_dwork_module([0, 1, 1], 3, 30)
    assert tensor(A, B).frobenius[0][0] == C.frobenius[0][0]
    assert tensor(A, B).twists == (DworkTwist((0, 1, 1)),)


def test_dual_is_negated_twist():
    D = dual(make_dwork_module([0, 0, 1], 3, 30))
    E = make_dwork_module([0, 0, -1], 3, 30)
    assert D.frobenius[0][0] == E.frobenius[0][0]
    assert D.connection == E.connection


def test_truncation_below_degree():
    with pytest.raises(TruncationError):
        make_dwork_module([0, 0, 1], 5, 9)
    with pytest.raises(ValueError):
        make_dwork_module([0, 1], 6, 30)


def test_matrix_helpers():
    F = pi_field(5)
    a = [[F(2), F.pi()], [F(1), F(3)]]
    inv = mat_inv(a, F)
    ident = mat_mul(a, inv, F)
    assert ident == [[F(1), F(0)], [F(0), F(1)]]
    assert mat_det(a, F) == F(6) - F.pi()
    cp = charpoly_one_minus(a, F)
    assert cp[0] == F(1) and cp[1] == -F(5) and cp[2] == mat_det(a, F)


def test_dwork_trick_residual():
    rng = random.Random(1)
    F = pi_field(5)
    for _ in range(5):
        r = rng.randint(1, 3)
        Nc = [[[F(rng.randint(-3, 3)) for _ in range(r)] for _ in range(r)] for _ in range(3)]
        U = horizontal_basis(Nc, 40, F)
        res = horizontal_residual(Nc, U, 40, F)
        assert all(v.is_zero() for mat in res for row in mat for v in row)


def test_fibers_are_character_values():
    M = make_dwork_module([0, 0, 1], 3, 60)
    for a in range(3):
        val = fiber_frobenius(M, a, 4)[0][0]
        expected = embed_cyclo(CycloElem.zeta(3, a * a), 4)
        assert val.agrees(expected, 4)
    with pytest.raises(RegimeError):
        fiber_frobenius(M, FiniteField(3, 2).gen(), 4)


def test_trivial_module():
    T = trivial_module(5, 10)
    assert T.is_constant() and T.connection_degree() == -1
    assert T.frobenius[0][0].coeffs[0] == pi_field(5).one()
