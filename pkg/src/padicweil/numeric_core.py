"""Exact arithmetic in K = Q(pi), pi^(p-1) = -p, in Z[zeta_p] and in F_{p^n}.

Elements of K are stored as p-1 exact rational coordinates in the basis
1, pi, ..., pi^(p-2).  Because the basis monomials have pairwise distinct
fractional valuations, the valuation of an element is the minimum of the
coordinate valuations and no cancellation analysis is ever needed.

Finite precision only enters through :class:`PiAdicApprox`, a projection of an
exact element together with the valuation below which it is asserted.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

INF = math.inf
_SCALARS = (int, Fraction, type(mpq(0)), type(mpz(0)))


def is_prime(n: int) -> bool:
    return n >= 2 and bool(gmpy2.is_prime(n))


def vp_int(n, p: int) -> int | float:
    """p-adic valuation of a nonzero integer (inf for 0)."""
    n = mpz(n)
    if n == 0:
        return INF
    return int(gmpy2.remove(n, p)[1])


def vp_rat(x, p: int) -> int | float:
    x = mpq(x)
    if x == 0:
        return INF
    return int(gmpy2.remove(x.numerator, p)[1]) - int(gmpy2.remove(x.denominator, p)[1])


def vp_factorial(n: int, p: int) -> int:
    """Legendre's formula for v_p(n!)."""
    total, pk = 0, p
    while pk <= n:
        total += n // pk
        pk *= p
    return total


def _rat_mod(c: mpq, p: int, k: int) -> mpq:
    """Canonical representative of c modulo p^k (c may have p in the denominator)."""
    if c == 0:
        return mpq(0)
    e = vp_rat(c, p)
    if e >= k:
        return mpq(0)
    u = c / mpq(p) ** e
    mod = mpz(p) ** (k - e)
    rep = (u.numerator * gmpy2.invert(u.denominator, mod)) % mod
    return mpq(rep) * mpq(p) ** e


# --------------------------------------------------------------------------
# K = Q(pi)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PiField:
    """The totally ramified extension Q(pi) with pi^(p-1) = -p."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def degree(self) -> int:
        return self.p - 1

    def __call__(self, value=0) -> "PiFieldElem":
        if isinstance(value, PiFieldElem):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        coords = [mpq(0)] * self.degree
        coords[0] = mpq(value)
        return PiFieldElem(self, tuple(coords))

    def zero(self) -> "PiFieldElem":
        return self(0)

    def one(self) -> "PiFieldElem":
        return self(1)

    def pi(self) -> "PiFieldElem":
        return self.monomial(1, 1)

    def monomial(self, c, k: int) -> "PiFieldElem":
        """c * pi^k for any integer k (negative k allowed)."""
        n = self.degree
        q, r = divmod(k, n)
        coords = [mpq(0)] * n
        coords[r] = mpq(c) * mpq(-self.p) ** q
        return PiFieldElem(self, tuple(coords))

    def from_coords(self, coords: Sequence) -> "PiFieldElem":
        if len(coords) != self.degree:
            raise ValueError("wrong number of coordinates")
        return PiFieldElem(self, tuple(mpq(c) for c in coords))


@lru_cache(maxsize=None)
def pi_field(p: int) -> PiField:
    return PiField(p)


class PiFieldElem:
    __slots__ = ("field", "coords")

    def __init__(self, field: PiField, coords: tuple):
        self.field = field
        self.coords = coords

    # -- helpers
    def _coerce(self, other) -> "PiFieldElem":
        if isinstance(other, PiFieldElem):
            if other.field.p != self.field.p:
                raise ValueError("mixing elements of different fields")
            return other
        if isinstance(other, _SCALARS):
            return self.field(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    # -- ring operations
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PiFieldElem(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return PiFieldElem(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PiFieldElem(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PiFieldElem":
        c = mpq(c)
        return PiFieldElem(self.field, tuple(a * c for a in self.coords))

    def __mul__(self, other):
        if not isinstance(other, PiFieldElem):
            other = self._coerce(other)
            if other is NotImplemented:
                return other
            if other.is_rational():
                return self.scale(other.coords[0])
        n = self.field.degree
        a, b = self.coords, other.coords
        acc = [mpq(0)] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        acc[i + j] += ai * bj
        mp = mpq(-self.field.p)
        out = acc[:n]
        for k in range(n, 2 * n - 1):
            if acc[k]:
                out[k - n] += mp * acc[k]
        return PiFieldElem(self.field, tuple(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> "PiFieldElem":
        """Multiply by pi^k."""
        n = self.field.degree
        out = [mpq(0)] * n
        mp = mpq(-self.field.p)
        for r, c in enumerate(self.coords):
            if c:
                q, s = divmod(r + k, n)
                out[s] += c * mp**q
        return PiFieldElem(self.field, tuple(out))

    def multiplication_matrix(self) -> list[list[mpq]]:
        n = self.field.degree
        cols = [self.shift(j).coords for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def inverse(self) -> "PiFieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        nz = [r for r, c in enumerate(self.coords) if c]
        if len(nz) == 1:
            r = nz[0]
            return self.field.monomial(1 / self.coords[r], -r)
        sol = _solve_rational(self.multiplication_matrix(), [1] + [0] * (self.field.degree - 1))
        return PiFieldElem(self.field, tuple(sol))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_rational():
            return self.scale(1 / other.coords[0])
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, PiFieldElem):
            return self.field.p == other.field.p and self.coords == other.coords
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash((self.field.p, self.coords))

    def valuation(self):
        return pi_valuation(self)

    def reduce_mod(self, m) -> "PiFieldElem":
        """Canonical representative modulo the elements of valuation >= m."""
        if m == INF:
            return self
        p, n = self.field.p, self.field.degree
        out = []
        for r, c in enumerate(self.coords):
            k = math.ceil(Fraction(m) - Fraction(r, n))
            out.append(_rat_mod(c, p, k))
        return PiFieldElem(self.field, tuple(out))

    def __repr__(self):
        terms = []
        for r, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}" if r == 0 else f"({c})*pi^{r}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list:
        """Sparse [rational-string, pi-power] pairs."""
        return [[str(c), r] for r, c in enumerate(self.coords) if c]


def _solve_rational(matrix, rhs) -> list[mpq]:
    n = len(matrix)
    a = [[mpq(v) for v in row] + [mpq(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def pi_valuation(x: PiFieldElem):
    """Valuation normalized by v(p) = 1; Fraction, or inf for zero."""
    n = x.field.degree
    best = INF
    for r, c in enumerate(x.coords):
        if c:
            v = Fraction(vp_rat(c, x.field.p)) + Fraction(r, n)
            if v < best:
                best = v
    return best


def pi_from_json(field: PiField, pairs) -> PiFieldElem:
    """Inverse of PiFieldElem.to_json; accepts [rational, pi-power] pairs."""
    out = field.zero()
    for c, k in pairs:
        out = out + field.monomial(mpq(Fraction(str(c))), int(k))
    return out


# --------------------------------------------------------------------------
# finite precision layer
# --------------------------------------------------------------------------


class PiAdicApprox:
    """An element of K asserted only modulo valuation >= known_mod."""

    __slots__ = ("value", "known_mod")

    def __init__(self, value: PiFieldElem, known_mod):
        if known_mod != INF:
            known_mod = Fraction(known_mod)
            value = value.reduce_mod(known_mod)
        self.value = value
        self.known_mod = known_mod

    @property
    def field(self) -> PiField:
        return self.value.field

    @classmethod
    def exact(cls, value: PiFieldElem) -> "PiAdicApprox":
        return cls(value, INF)

    def _lift(self, other) -> "PiAdicApprox":
        if isinstance(other, PiAdicApprox):
            return other
        return PiAdicApprox(self.value._coerce(other), INF)

    def __add__(self, other):
        other = self._lift(other)
        return PiAdicApprox(self.value + other.value, min(self.known_mod, other.known_mod))

    __radd__ = __add__

    def __neg__(self):
        return PiAdicApprox(-self.value, self.known_mod)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        va, vb = pi_valuation(self.value), pi_valuation(other.value)
        known = min(self.known_mod + min(vb, other.known_mod),
                    other.known_mod + min(va, self.known_mod))
        return PiAdicApprox(self.value * other.value, known)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = PiAdicApprox.exact(self.field.one())
        for _ in range(e):
            out = out * self
        return out

    def divide(self, other) -> "PiAdicApprox":
        """Division by an element whose valuation is certified."""
        other = self._lift(other)
        vb = pi_valuation(other.value)
        if vb >= other.known_mod:
            raise ArithmeticError("divisor is indistinguishable from zero")
        inv = other.value.inverse()
        known = min(self.known_mod - vb, other.known_mod - 2 * vb + min(pi_valuation(self.value), self.known_mod))
        return PiAdicApprox(self.value * inv, known)

    def valuation(self):
        """Certified valuation, or known_mod as a lower bound when undetermined."""
        return min(pi_valuation(self.value), self.known_mod)

    def is_certified_nonzero(self) -> bool:
        return pi_valuation(self.value) < self.known_mod

    def discrepancy(self, other) -> Fraction | float:
        """Valuation of self - other; capped by the jointly known precision."""
        other = self._lift(other)
        return (self - other).valuation()

    def agrees(self, other, m=None) -> bool:
        other = self._lift(other)
        target = min(self.known_mod, other.known_mod) if m is None else m
        return pi_valuation(self.value - other.value) >= target

    def __repr__(self):
        return f"{self.value!r} + O(v>={self.known_mod})"


# --------------------------------------------------------------------------
# Z[zeta_p]
# --------------------------------------------------------------------------


class CycloElem:
    """Element of Q(zeta_p) in the basis 1, zeta, ..., zeta^(p-2)."""

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence):
        if len(coords) != p - 1:
            raise ValueError("CycloElem needs p-1 coordinates")
        self.p = p
        self.coords = tuple(mpq(c) for c in coords)

    @classmethod
    def from_exponents(cls, p: int, counts: Sequence) -> "CycloElem":
        """sum_k counts[k] * zeta^k for k in 0..p-1 (full cyclic representation)."""
        counts = list(counts) + [0] * (p - len(counts))
        top = counts[p - 1]
        return cls(p, [counts[k] - top for k in range(p - 1)])

    @classmethod
    def rational(cls, p: int, c) -> "CycloElem":
        return cls(p, [c] + [0] * (p - 2))

    @classmethod
    def zeta(cls, p: int, k: int = 1) -> "CycloElem":
        counts = [0] * p
        counts[k % p] = 1
        return cls.from_exponents(p, counts)

    def _coerce(self, other):
        if isinstance(other, CycloElem):
            if other.p != self.p:
                raise ValueError("mixing different cyclotomic fields")
            return other
        return CycloElem.rational(self.p, other)

    def cyclic(self) -> list[mpq]:
        return list(self.coords) + [mpq(0)]

    def __add__(self, other):
        other = self._coerce(other)
        return CycloElem(self.p, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.p, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        p = self.p
        acc = [mpq(0)] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        acc[(i + j) % p] += a * b
        return CycloElem.from_exponents(p, acc)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = mpq(c)
        return CycloElem(self.p, [a / c for a in self.coords])

    def __pow__(self, e: int):
        out = CycloElem.rational(self.p, 1)
        for _ in range(e):
            out = out * self
        return out

    def galois(self, k: int) -> "CycloElem":
        """The automorphism zeta -> zeta^k."""
        p = self.p
        acc = [mpq(0)] * p
        for i, a in enumerate(self.coords):
            acc[(i * k) % p] += a
        return CycloElem.from_exponents(p, acc)

    def conjugate(self) -> "CycloElem":
        return self.galois(-1)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, CycloElem):
            other = CycloElem.rational(self.p, other)
        return self.p == other.p and self.coords == other.coords

    def __hash__(self):
        return hash((self.p, self.coords))

    def lambda_coords(self) -> list[mpq]:
        """Coordinates in the basis lambda^j, lambda = zeta - 1 (no reduction needed)."""
        p = self.p
        out = [mpq(0)] * (p - 1)
        for k, c in enumerate(self.coords):
            if c:
                for j in range(k + 1):
                    out[j] += c * math.comb(k, j)
        return out

    def valuation(self):
        """Exact valuation at the prime above p, normalized by v(p) = 1."""
        best = INF
        n = self.p - 1
        for j, b in enumerate(self.lambda_coords()):
            if b:
                best = min(best, Fraction(vp_rat(b, self.p)) + Fraction(j, n))
        return best

    def __repr__(self):
        terms = [f"{c}" if k == 0 else f"{c}*z^{k}" for k, c in enumerate(self.coords) if c]
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coords]


def complex_embeddings(x: CycloElem) -> list[complex]:
    """Values under zeta -> exp(2 pi i k / p), k = 1..p-1."""
    p = x.p
    out = []
    for k in range(1, p):
        z = cmath.exp(2j * math.pi * k / p)
        out.append(sum(float(c) * z**i for i, c in enumerate(x.coords)))
    return out


# --------------------------------------------------------------------------
# bridges into K
# --------------------------------------------------------------------------


def hensel_zeta_p(field: PiField, m) -> PiAdicApprox:
    """The p-th root of unity z = 1 + t with t = pi mod pi^2, to valuation m.

    Newton's method on ((1+t)^p - 1)/t, seeded with the truncated exponential
    sum_{i<p} pi^i / i!, which is already inside the quadratic basin.
    """
    p = field.p
    if p == 2:
        return PiAdicApprox.exact(field(-1))
    m = Fraction(m)
    if m < 1:
        raise ValueError("precision must be at least 1")
    work = m + 2
    pi = field.pi()
    t = field.zero()
    term = field.one()
    for i in range(1, p):
        term = term * pi / i
        t = t + term
    coeffs = [math.comb(p, k + 1) for k in range(p)]  # f(t) = sum coeffs[k] t^k

    def f_and_df(t):
        val, der = field.zero(), field.zero()
        for k in reversed(range(p)):
            der = der * t + val
            val = val * t + coeffs[k]
        return val, der

    for _ in range(200):
        val, der = f_and_df(t)
        if pi_valuation(val) - pi_valuation(der) >= m:
            return PiAdicApprox(field.one() + t, m)
        t = (t - val / der).reduce_mod(work)
    raise ArithmeticError("Newton iteration for zeta_p failed to converge")


@lru_cache(maxsize=64)
def _zeta_powers(p: int, m) -> tuple:
    z = hensel_zeta_p(pi_field(p), m)
    pows = [PiAdicApprox.exact(pi_field(p).one())]
    for _ in range(p - 2):
        pows.append(pows[-1] * z)
    return tuple(pows)


def embed_cyclo(x: CycloElem, m) -> PiAdicApprox:
    """Ring homomorphism Q(zeta_p) -> K, zeta -> hensel_zeta_p, at precision m."""
    m = Fraction(m) if m != INF else m
    field = pi_field(x.p)
    if x.p == 2:
        return PiAdicApprox.exact(field(x.coords[0]))
    pows = _zeta_powers(x.p, m)
    acc = PiAdicApprox.exact(field.zero())
    for c, zk in zip(x.coords, pows):
        if c:
            acc = acc + zk * field(c)
    return acc


# --------------------------------------------------------------------------
# F_{p^n}
# --------------------------------------------------------------------------


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mulmod(a, b, mod, p):
    n = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for j in range(n + 1):
                prod[k - n + j] = (prod[k - n + j] - c * mod[j]) % p
    return _poly_trim(prod[:n])


def _poly_powmod(base, e, mod, p):
    result = [1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        e >>= 1
        if e:
            base = _poly_mulmod(base, base, mod, p)
    return result


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b) and a:
            c = a[-1] * inv % p
            shift = len(a) - len(b)
            for j, y in enumerate(b):
                a[shift + j] = (a[shift + j] - c * y) % p
            _poly_trim(a)
        a, b = b, a
    return a


def _is_irreducible(mod: list[int], p: int) -> bool:
    n = len(mod) - 1
    x = [0, 1]
    if n == 1:
        return True
    if _poly_powmod(x, p**n, mod, p) != _poly_trim(list(x)):
        return False
    for r in {f for f in range(2, n + 1) if n % f == 0 and is_prime(f)}:
        h = _poly_powmod(x, p ** (n // r), mod, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_poly_gcd(mod, _poly_trim(h), p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def conway_free_modulus(p: int, n: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree n (ascending coefficients).

    Candidates are ordered by the integer sum c_i p^i over the non-leading
    coefficients, so the choice is reproducible across runs.
    """
    if n == 1:
        return (0, 1)
    for idx in range(p**n):
        coeffs = []
        v = idx
        for _ in range(n):
            coeffs.append(v % p)
            v //= p
        mod = coeffs + [1]
        if coeffs[0] and _is_irreducible(mod, p):
            return tuple(mod)
    raise ArithmeticError("no irreducible polynomial found")


@dataclass(frozen=True)
class FiniteField:
    p: int
    n: int = 1

    @property
    def modulus(self) -> tuple[int, ...]:
        return conway_free_modulus(self.p, self.n)

    @property
    def order(self) -> int:
        return self.p**self.n

    def __call__(self, value) -> "FFElem":
        if isinstance(value, int):
            return FFElem(self, (value % self.p,))
        return FFElem(self, tuple(int(c) % self.p for c in value))

    def gen(self) -> "FFElem":
        return self([0, 1]) if self.n > 1 else self(0)

    def elements(self) -> Iterable["FFElem"]:
        for idx in range(self.order):
            coeffs = []
            v = idx
            for _ in range(self.n):
                coeffs.append(v % self.p)
                v //= self.p
            yield self(coeffs)


class FFElem:
    __slots__ = ("field", "rep")

    def __init__(self, field: FiniteField, rep: Sequence[int]):
        self.field = field
        rep = list(rep)
        if len(rep) > field.n:
            rep = _poly_mulmod(rep, [1], list(field.modulus), field.p)
        self.rep = tuple(_poly_trim([c % field.p for c in rep]))

    def _coerce(self, other):
        return other if isinstance(other, FFElem) else self.field(other)

    def __add__(self, other):
        other = self._coerce(other)
        k = max(len(self.rep), len(other.rep))
        a = list(self.rep) + [0] * (k - len(self.rep))
        b = list(other.rep) + [0] * (k - len(other.rep))
        return FFElem(self.field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return FFElem(self.field, [-c for c in self.rep])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        return FFElem(self.field, _poly_mulmod(list(self.rep), list(other.rep), list(self.field.modulus), self.field.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FFElem(self.field, _poly_powmod(list(self.rep), e, list(self.field.modulus), self.field.p))

    def inverse(self) -> "FFElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.order - 2)

    def frobenius(self) -> "FFElem":
        return self ** self.field.p

    def is_zero(self) -> bool:
        return not self.rep

    def __eq__(self, other):
        other = self._coerce(other)
        return self.field == other.field and self.rep == other.rep

    def __hash__(self):
        return hash((self.field, self.rep))

    def coeffs(self) -> list[int]:
        return list(self.rep) + [0] * (self.field.n - len(self.rep))

    def __repr__(self):
        return f"FF{self.field.p}^{self.field.n}{list(self.rep)}"


def ff_trace(x: FFElem) -> int:
    """Absolute trace Tr_{F_{p^n}/F_p}(x) as an integer in [0, p)."""
    acc = x.field(0)
    y = x
    for _ in range(x.field.n):
        acc = acc + y
        y = y.frobenius()
    if len(acc.rep) > 1:
        raise ArithmeticError("trace did not land in the prime field")
    return acc.rep[0] if acc.rep else 0
