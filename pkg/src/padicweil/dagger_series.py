"""Polynomials, truncated overconvergent series and Laurent fragments over K."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .numeric_core import INF, PiAdicApprox, PiField, PiFieldElem, pi_valuation

#: refuse substitutions x -> x^q that would blow a series past this degree
DEGREE_CAP = 200_000


class TruncationError(ValueError):
    pass


def _strip(coeffs: list) -> list:
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


class Poly:
    """Exact polynomial over K, dense ascending coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PiField, coeffs: Sequence = ()):
        self.field = field
        self.coeffs = tuple(_strip([field(c) for c in coeffs]))

    @classmethod
    def x(cls, field: PiField) -> "Poly":
        return cls(field, [0, 1])

    @classmethod
    def constant(cls, field: PiField, c) -> "Poly":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> PiFieldElem:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = _as_poly(self.field, other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.field, [self[i] + other[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(self.field, other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_poly(self.field, other)
        if self.is_zero() or other.is_zero():
            return Poly(self.field)
        out = [self.field.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def derivative(self) -> "Poly":
        return Poly(self.field, [c.scale(i) for i, c in enumerate(self.coeffs)][1:])

    def substitute_power(self, q: int) -> "Poly":
        """f(x^q)."""
        out = [self.field.zero()] * (q * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[q * i] = c
        return Poly(self.field, out)

    def __call__(self, x):
        acc = self.field.zero() if not isinstance(x, PiAdicApprox) else PiAdicApprox.exact(self.field.zero())
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        other = _as_poly(self.field, other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def to_series(self, N: int) -> "TruncatedSeries":
        return TruncatedSeries(self.field, self.coeffs[: N + 1], N, tail_slope=INF if self.degree <= N else None)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"


def _as_poly(field, obj) -> Poly:
    if isinstance(obj, Poly):
        return obj
    return Poly(field, [obj])


def integer_poly(field: PiField, coeffs: Sequence[int], scale: PiFieldElem | None = None) -> Poly:
    """Polynomial with integer coefficients, optionally multiplied by a constant of K."""
    out = Poly(field, [field(c) for c in coeffs])
    return out * scale if scale is not None else out


class TruncatedSeries:
    """Power series over K known through degree ``trunc_order``.

    ``tail_slope`` (with ``tail_offset``) certifies that every discarded
    coefficient c_i, i > trunc_order, has valuation >= tail_slope*i + tail_offset.
    ``None`` means no certificate; ``inf`` means the series is a polynomial.
    """

    __slots__ = ("field", "coeffs", "trunc_order", "tail_slope", "tail_offset")

    def __init__(self, field: PiField, coeffs: Sequence, trunc_order: int,
                 tail_slope=None, tail_offset=Fraction(0)):
        coeffs = [field(c) for c in coeffs][: trunc_order + 1]
        coeffs += [field.zero()] * (trunc_order + 1 - len(coeffs))
        if tail_slope is not None and tail_slope != INF and tail_slope <= 0:
            raise ValueError("tail certificate must have positive slope")
        self.field = field
        self.coeffs = tuple(coeffs)
        self.trunc_order = trunc_order
        self.tail_slope = tail_slope
        self.tail_offset = Fraction(tail_offset)

    @classmethod
    def one(cls, field: PiField, N: int) -> "TruncatedSeries":
        return cls(field, [1], N, tail_slope=INF)

    def __getitem__(self, i: int) -> PiFieldElem:
        return self.coeffs[i] if 0 <= i <= self.trunc_order else self.field.zero()

    def _weaker(self, other: "TruncatedSeries"):
        if self.tail_slope is None or other.tail_slope is None:
            return None, Fraction(0)
        slope = min(self.tail_slope, other.tail_slope)
        return slope, min(self.tail_offset, other.tail_offset)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries(self.field, [other], self.trunc_order, INF)
        N = min(self.trunc_order, other.trunc_order)
        slope, off = self._weaker(other)
        return TruncatedSeries(self.field, [self[i] + other[i] for i in range(N + 1)], N, slope, off)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.field, [-c for c in self.coeffs], self.trunc_order,
                               self.tail_slope, self.tail_offset)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TruncatedSeries":
        c = self.field(c)
        shift = pi_valuation(c)
        off = self.tail_offset + shift if shift != INF else self.tail_offset
        return TruncatedSeries(self.field, [a * c for a in self.coeffs], self.trunc_order,
                               self.tail_slope, off)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        N = min(self.trunc_order, other.trunc_order)
        out = [self.field.zero()] * (N + 1)
        a_nz = [(i, a) for i, a in enumerate(self.coeffs[: N + 1]) if a]
        b_nz = [(j, b) for j, b in enumerate(other.coeffs[: N + 1]) if b]
        for i, a in a_nz:
            for j, b in b_nz:
                if i + j > N:
                    break
                out[i + j] = out[i + j] + a * b
        slope, off = self._weaker(other)
        if slope is not None and slope != INF:
            off = self.global_offset(slope) + other.global_offset(slope)
        return TruncatedSeries(self.field, out, N, slope, off)

    def global_offset(self, slope) -> Fraction:
        """Largest c with v(c_i) >= slope*i + c for every degree, stored or not."""
        off = self.tail_offset if self.tail_slope not in (None, INF) else Fraction(10**9)
        if self.tail_slope not in (None, INF) and self.tail_slope < slope:
            raise ValueError("requested slope exceeds the certificate")
        for i, c in enumerate(self.coeffs):
            if c:
                off = min(off, pi_valuation(c) - slope * i)
        return off

    __rmul__ = __mul__

    def min_valuation(self):
        return min((pi_valuation(c) for c in self.coeffs if c), default=INF)

    def derivative(self) -> "TruncatedSeries":
        N = self.trunc_order - 1
        return TruncatedSeries(self.field, [c.scale(i) for i, c in enumerate(self.coeffs)][1:], N,
                               self.tail_slope, self.tail_offset - (self.tail_slope or 0)
                               if self.tail_slope not in (None, INF) else self.tail_offset)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by x^k; the truncation order moves up by k."""
        coeffs = [self.field.zero()] * k + list(self.coeffs)
        off = self.tail_offset
        if self.tail_slope not in (None, INF):
            off = off - self.tail_slope * k
        return TruncatedSeries(self.field, coeffs, self.trunc_order + k, self.tail_slope, off)

    def truncate(self, N: int) -> "TruncatedSeries":
        if N > self.trunc_order:
            raise TruncationError("cannot extend a truncated series")
        return TruncatedSeries(self.field, self.coeffs[: N + 1], N, self.tail_slope, self.tail_offset)

    def tail_bound(self, i: int):
        """Certified lower bound for the valuation of coefficient i > trunc_order."""
        if self.tail_slope is None:
            return -INF
        if self.tail_slope == INF:
            return INF
        return self.tail_slope * i + self.tail_offset

    def evaluate(self, point: PiAdicApprox) -> PiAdicApprox:
        """Sum the stored terms at a point of valuation >= 0.

        The result's known_mod is capped by the tail certificate at degree N+1.
        """
        acc = PiAdicApprox.exact(self.field.zero())
        for c in reversed(self.coeffs):
            acc = acc * point + c
        tail = self.tail_bound(self.trunc_order + 1)
        if tail == -INF:
            raise TruncationError("series has no tail certificate; cannot bound the evaluation")
        if tail != INF:
            acc = PiAdicApprox(acc.value, min(acc.known_mod, tail))
        return acc

    def measured_slope(self, lo: int, hi: int):
        """min over lo <= i <= hi of v(c_i)/i on stored coefficients."""
        hi = min(hi, self.trunc_order)
        return min((pi_valuation(self.coeffs[i]) / i for i in range(max(lo, 1), hi + 1)), default=INF)

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries) and self.trunc_order == other.trunc_order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        shown = ", ".join(repr(c) for c in self.coeffs[:4])
        return f"TruncatedSeries([{shown}, ...], N={self.trunc_order})"


def exp_poly(f: Poly, N: int, tail_slope=None) -> TruncatedSeries:
    """exp(f) through degree N for a polynomial f with f(0) = 0.

    Uses the exact recurrence m E_m = sum_j j f_j E_{m-j}, obtained from
    E' = f' E; only the nonzero coefficients of f contribute.
    """
    if f[0]:
        raise ValueError("exp_poly needs a polynomial with zero constant term")
    field = f.field
    terms = [(j, c.scale(j)) for j, c in enumerate(f.coeffs) if c]
    E = [field.one()] + [field.zero()] * N
    for m in range(1, N + 1):
        acc = field.zero()
        for j, jc in terms:
            if j > m:
                break
            if E[m - j]:
                acc = acc + jc * E[m - j]
        E[m] = acc.scale(Fraction(1, m))
    if f.is_zero():
        tail_slope = INF
    return TruncatedSeries(field, E, N, tail_slope)


def exp_poly_naive(f: Poly, N: int) -> TruncatedSeries:
    """exp(f) as sum_k f^k/k!, truncated; independent cross-check of exp_poly."""
    field = f.field
    total = TruncatedSeries.one(field, N)
    power = TruncatedSeries.one(field, N)
    fs = f.to_series(N) if f.degree <= N else TruncatedSeries(field, f.coeffs, N)
    k = 0
    while True:
        k += 1
        power = (power * fs).scale(Fraction(1, k))
        if all(c.is_zero() for c in power.coeffs):
            break
        total = total + power
    return TruncatedSeries(field, total.coeffs, N)


def frobenius_substitute(f: TruncatedSeries, q: int) -> TruncatedSeries:
    """f(x^q); coefficients untouched since the base field carries the identity."""
    N = q * (f.trunc_order + 1) - 1
    if N > DEGREE_CAP:
        raise TruncationError(f"substitution x -> x^{q} exceeds the degree cap {DEGREE_CAP}")
    out = [f.field.zero()] * (N + 1)
    for i, c in enumerate(f.coeffs):
        out[q * i] = c
    slope = f.tail_slope
    if slope not in (None, INF):
        slope = slope / q
    return TruncatedSeries(f.field, out, N, slope, f.tail_offset)


class LaurentFragment:
    """Finite piece sum_{n=-N}^{N} c_n t^n of an element of the Robba ring."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PiField, coeffs: dict):
        self.field = field
        self.coeffs = {int(n): field(c) for n, c in coeffs.items() if field(c)}

    def __mul__(self, other):
        out: dict[int, PiFieldElem] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                out[i + j] = out.get(i + j, self.field.zero()) + a * b
        return LaurentFragment(self.field, out)

    def __add__(self, other):
        out = dict(self.coeffs)
        for j, b in other.coeffs.items():
            out[j] = out.get(j, self.field.zero()) + b
        return LaurentFragment(self.field, out)


def w_r(x: LaurentFragment, r) -> Fraction | float:
    """min_n v(c_n) + r n, the Robba valuation at radius parameter r > 0."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("w_r needs r > 0")
    return min((pi_valuation(c) + r * n for n, c in x.coeffs.items()), default=INF)


def gauss_valuation(f: TruncatedSeries, r) -> Fraction | float:
    """w_r restricted to the stored coefficients of a power series."""
    return w_r(LaurentFragment(f.field, dict(enumerate(f.coeffs))), r)


def dwork_slope(p: int, q: int, degree: int) -> Fraction:
    """Certified decay of exp(pi (P(x) - P(x^q))) for integral P of the given degree.

    Dwork's splitting series exp(pi(y - y^p)) has coefficients of valuation
    >= i (p-1)/p^2; the q-power version is a product of its substitutions
    y -> x^{k p^j}, the slowest of which sets the slope.
    """
    if degree <= 0:
        return INF
    return Fraction(p - 1, degree * p * q)


def splitting_series(p: int, N: int, q: int | None = None, sign: int = 1) -> TruncatedSeries:
    """exp(sign * pi (x - x^q)), Dwork's splitting series for sign=+1, q=p."""
    from .numeric_core import pi_field

    q = q or p
    field = pi_field(p)
    f = Poly(field, [0, 1] + [0] * (q - 2) + [-1]) * field.monomial(sign, 1)
    return exp_poly(f, N, tail_slope=dwork_slope(p, q, 1))

