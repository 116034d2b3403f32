"""Exact exponential sums over finite fields and their L-polynomials.

Everything here lives in Q(zeta_p); no p-adic or floating arithmetic is used,
so these values are the ground truth the cohomological side is checked against.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numeric_core import CycloElem, FFElem, FiniteField, conway_free_modulus, ff_trace

ENUMERATION_BUDGET = 10**7


class BudgetError(ValueError):
    pass


class OracleInconsistency(ArithmeticError):
    def __init__(self, order: int, msg: str = ""):
        super().__init__(msg or f"L-series coefficient at order {order} does not vanish")
        self.order = order


def _all_elements(p: int, n: int) -> np.ndarray:
    """Every element of F_{p^n} as a row of n base-p digits (index order)."""
    idx = np.arange(p**n, dtype=np.int64)
    out = np.empty((p**n, n), dtype=np.int64)
    for k in range(n):
        out[:, k] = idx % p
        idx //= p
    return out


def _vec_mulmod(a: np.ndarray, b: np.ndarray, mod: Sequence[int], p: int) -> np.ndarray:
    """Row-wise product of polynomials (columns = coefficients) modulo ``mod``."""
    n = len(mod) - 1
    prod = np.zeros((max(a.shape[0], b.shape[0]), 2 * n - 1), dtype=np.int64)
    for i in range(n):
        ai = a[:, i]
        if not ai.any():
            continue
        for j in range(n):
            prod[:, i + j] += ai * b[:, j]
    prod %= p
    for k in range(2 * n - 2, n - 1, -1):
        c = prod[:, k].copy()
        if c.any():
            for j in range(n + 1):
                prod[:, k - n + j] -= c * mod[j]
            prod %= p
    return prod[:, :n] % p


def _trace_vector(p: int, n: int) -> np.ndarray:
    """Tr(X^i) for the basis monomials of F_{p^n}."""
    F = FiniteField(p, n)
    out = []
    for i in range(n):
        out.append(ff_trace(F([0] * i + [1])))
    return np.array(out, dtype=np.int64)


def _embed_subfield(p: int, k: int, n: int) -> np.ndarray:
    """Image in F_{p^(k n)} of the generator of F_{p^k} (some root of its modulus)."""
    if k == 1:
        out = np.zeros((1, n * k), dtype=np.int64)
        return out
    big = k * n
    mod_small = conway_free_modulus(p, k)
    mod_big = conway_free_modulus(p, big)
    elems = _all_elements(p, big)
    acc = np.zeros_like(elems)
    acc[:, 0] = mod_small[-1]
    for c in reversed(mod_small[:-1]):
        acc = _vec_mulmod(acc, elems, mod_big, p)
        acc[:, 0] = (acc[:, 0] + c) % p
    roots = np.nonzero(~acc.any(axis=1))[0]
    return elems[roots[0]][None, :]


def _coeff_in_big_field(c, p: int, k: int, n: int, gen_img: np.ndarray) -> np.ndarray:
    """Coefficient (int or F_{p^k} digit list) as a row vector of F_{p^(k n)}."""
    big = k * n
    row = np.zeros((1, big), dtype=np.int64)
    if isinstance(c, FFElem):
        c = c.coeffs()
    if isinstance(c, (int, np.integer)):
        row[0, 0] = int(c) % p
        return row
    digits = list(c)
    if k == 1:
        row[0, 0] = int(digits[0]) % p if digits else 0
        return row
    mod_big = conway_free_modulus(p, big)
    power = np.zeros((1, big), dtype=np.int64)
    power[0, 0] = 1
    for d in digits:
        row = (row + int(d) * power) % p
        power = _vec_mulmod(power, gen_img, mod_big, p)
    return row


def char_sum(P: Sequence, p: int, n: int, base_degree: int = 1) -> CycloElem:
    """sum_{x in F_{q^n}} zeta^{Tr(P(x))}, q = p^base_degree, computed exactly.

    Coefficients of P are integers or, when ``base_degree`` > 1, digit lists
    (or FFElem) of F_q in the basis of its fixed modulus.
    """
    big = base_degree * n
    if p**big > ENUMERATION_BUDGET:
        raise BudgetError(f"F_{p}^{big} has more than {ENUMERATION_BUDGET} elements")
    mod = conway_free_modulus(p, big)
    elems = _all_elements(p, big)
    gen_img = _embed_subfield(p, base_degree, n)
    coeffs = [_coeff_in_big_field(c, p, base_degree, n, gen_img) for c in P]
    if not coeffs:
        coeffs = [np.zeros((1, big), dtype=np.int64)]
    acc = np.repeat(coeffs[-1], elems.shape[0], axis=0)
    for c in reversed(coeffs[:-1]):
        acc = (_vec_mulmod(acc, elems, mod, p) + c) % p
    tr = (acc @ _trace_vector(p, big)) % p
    counts = np.bincount(tr, minlength=p)
    return CycloElem.from_exponents(p, [int(c) for c in counts])


def char_sum_naive(P: Sequence[int], p: int, n: int) -> CycloElem:
    """Element-by-element enumeration through FFElem; slow independent route."""
    F = FiniteField(p, n)
    counts = [0] * p
    for x in F.elements():
        val = F(0)
        for c in reversed(list(P)):
            val = val * x + c
        counts[ff_trace(val)] += 1
    return CycloElem.from_exponents(p, counts)


@dataclass
class SumSeries:
    P: tuple
    p: int
    values: list  # S_1..S_D
    base_degree: int = 1

    @property
    def q(self) -> int:
        return self.p**self.base_degree


def sum_series(P: Sequence, p: int, D: int, base_degree: int = 1) -> SumSeries:
    return SumSeries(tuple(P), p, [char_sum(P, p, n, base_degree) for n in range(1, D + 1)], base_degree)


@dataclass
class LPolynomial:
    coeffs: list  # CycloElem, constant term 1
    h_degrees: dict = field(default_factory=dict)
    q: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __mul__(self, other: "LPolynomial") -> "LPolynomial":
        p = self.coeffs[0].p
        out = [CycloElem.rational(p, 0) for _ in range(self.degree + other.degree + 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        hd = {k: self.h_degrees.get(k, 0) + other.h_degrees.get(k, 0) for k in set(self.h_degrees) | set(other.h_degrees)}
        return LPolynomial(out, hd, self.q)


def log_series_to_poly(values: Sequence[CycloElem], D: int, p: int) -> list[CycloElem]:
    """Coefficients l_0..l_D of exp(sum_n S_n t^n / n), via k l_k = sum_n S_n l_{k-n}."""
    ell = [CycloElem.rational(p, 1)]
    for k in range(1, D + 1):
        acc = CycloElem.rational(p, 0)
        for n in range(1, k + 1):
            acc = acc + values[n - 1] * ell[k - n]
        ell.append(acc / k)
    return ell


def l_poly_from_sums(values: Sequence[CycloElem], expected_degree: int, p: int | None = None,
                     h2_factor: Sequence | None = None, q: int = 0) -> LPolynomial:
    """Recover det(1 - F t | H^1_c) from S_1..S_D.

    ``h2_factor`` (coefficients of det(1 - F t | H^2_c)) multiplies the
    exponential series first, which turns the L-function into a polynomial.
    Orders beyond the expected degree must vanish exactly.
    """
    D = len(values)
    if D < expected_degree:
        raise ValueError("need at least expected_degree sums")
    p = p or values[0].p
    ell = log_series_to_poly(values, D, p)
    if h2_factor is not None:
        h2 = [c if isinstance(c, CycloElem) else CycloElem.rational(p, c) for c in h2_factor]
        ell = [sum((h2[j] * ell[k - j] for j in range(min(k, len(h2) - 1) + 1)), CycloElem.rational(p, 0))
               for k in range(D + 1)]
    for k in range(expected_degree + 1, D + 1):
        if not ell[k].is_zero():
            raise OracleInconsistency(k)
    hd = {1: expected_degree}
    if h2_factor is not None:
        hd[2] = len(h2_factor) - 1
    return LPolynomial(ell[: expected_degree + 1], hd, q)


def l_poly_degree(values: Sequence[CycloElem], p: int) -> int:
    """Largest k <= D with a nonzero coefficient of exp(sum S_n t^n/n) mod t^(D+1)."""
    ell = log_series_to_poly(values, len(values), p)
    return max(k for k, c in enumerate(ell) if not c.is_zero())


def power_sums_from_poly(coeffs: Sequence, n_max: int, zero, scale_int=None) -> list:
    """Tr(F^n) for n = 1..n_max from det(1 - F t) = sum c_k t^k (Newton's identities)."""
    D = len(coeffs) - 1
    sums = []
    for n in range(1, n_max + 1):
        acc = zero
        if n <= D:
            acc = acc - coeffs[n] * n
        for k in range(1, min(n - 1, D) + 1):
            acc = acc - coeffs[k] * sums[n - k - 1]
        sums.append(acc)
    return sums


def module_sum_series(twists, p: int, D: int, tate: int = 0, base_degree: int = 1) -> list[CycloElem]:
    """S_n of a direct sum of Dwork twists, Tate twist tate: sum_s q^(n tate) S_n(P_s)."""
    q = p**base_degree
    out = []
    for n in range(1, D + 1):
        total = CycloElem.rational(p, 0)
        for t in twists:
            coeffs = t.coeffs if hasattr(t, "coeffs") else t
            total = total + char_sum(coeffs or [0], p, n, base_degree)
        out.append(total * Fraction(q) ** (n * tate))
    return out
