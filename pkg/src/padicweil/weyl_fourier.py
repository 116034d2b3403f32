"""The overconvergent Weyl algebra (finite-support model) and fiberwise Fourier transform.

Operators are sparse maps (i, j) -> coefficient for x^i d^j in normal order,
with the commutation rule d x - x d = 1/pi.  The Fourier automorphism rho
sends x to d and d to -x.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .cohomology import CharPoly, H1Presentation, frobenius_on_h1, identify_charpoly, weight_check
from .dagger_series import Poly, TruncatedSeries, exp_poly, dwork_slope
from .numeric_core import INF, CycloElem, FFElem, PiField, PiFieldElem, pi_field, pi_valuation
from .oracle_sums import l_poly_from_sums, module_sum_series, char_sum
from .sigma_nabla import RegimeError, SigmaNablaModule, make_dwork_module, tensor


class WeylOperator:
    """Finite sum of c_ij x^i d^j."""

    __slots__ = ("field", "terms")

    def __init__(self, field: PiField, terms: dict | None = None):
        self.field = field
        self.terms = {k: field(v) for k, v in (terms or {}).items() if v}
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def x(cls, field: PiField, power: int = 1) -> "WeylOperator":
        return cls(field, {(power, 0): 1})

    @classmethod
    def d(cls, field: PiField, power: int = 1) -> "WeylOperator":
        return cls(field, {(0, power): 1})

    @classmethod
    def constant(cls, field: PiField, c=1) -> "WeylOperator":
        return cls(field, {(0, 0): c})

    def __add__(self, other):
        other = _as_op(self.field, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return WeylOperator(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylOperator(self.field, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_as_op(self.field, other))

    def scale(self, c) -> "WeylOperator":
        c = self.field(c)
        return WeylOperator(self.field, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        return weyl_mul(self, _as_op(self.field, other))

    def __rmul__(self, other):
        return weyl_mul(_as_op(self.field, other), self)

    def __eq__(self, other):
        if not isinstance(other, WeylOperator):
            other = _as_op(self.field, other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def min_decay(self):
        """min v(c_ij)/(i+j) over non-constant terms: a linear-growth witness."""
        vals = [pi_valuation(v) / (i + j) for (i, j), v in self.terms.items() if i + j]
        return min(vals) if vals else INF

    def to_json(self) -> list:
        return [[i, j, v.to_json()] for (i, j), v in sorted(self.terms.items())]

    def __repr__(self):
        parts = [f"({v!r})x^{i}d^{j}" for (i, j), v in sorted(self.terms.items())]
        return " + ".join(parts) or "0"


def _as_op(field, obj) -> WeylOperator:
    return obj if isinstance(obj, WeylOperator) else WeylOperator.constant(field, obj)


def _commute_coeff(field: PiField, j: int, k: int, s: int) -> PiFieldElem:
    # d^j x^k = sum_s j! k! / (pi^s s! (j-s)! (k-s)!) x^(k-s) d^(j-s)
    c = Fraction(factorial(j) * factorial(k), factorial(s) * factorial(j - s) * factorial(k - s))
    return field.monomial(c, -s)


def normal_form(word: Iterable, field: PiField) -> WeylOperator:
    """Normal-order a word of generators 'x', 'd' and central scalars.

    Works one generator at a time using only (x^i d^j) x = x^(i+1) d^j + j/pi x^i d^(j-1).
    """
    pinv = field.monomial(1, -1)
    acc = {(0, 0): field.one()}
    for tok in word:
        out: dict = {}

        def put(k, v):
            out[k] = out[k] + v if k in out else v

        if tok == "x":
            for (i, j), c in acc.items():
                put((i + 1, j), c)
                if j:
                    put((i, j - 1), c * pinv.scale(j))
        elif tok == "d":
            for (i, j), c in acc.items():
                put((i, j + 1), c)
        else:
            s = field(tok)
            for k, c in acc.items():
                put(k, c * s)
        acc = {k: v for k, v in out.items() if v}
    return WeylOperator(field, acc)


def weyl_mul(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    """Product in normal order: moves each d^j past x^k in one step."""
    field = a.field
    out: dict = {}
    for (i, j), ca in a.terms.items():
        for (k, l), cb in b.terms.items():
            base = ca * cb
            for s in range(min(j, k) + 1):
                key = (i + k - s, j + l - s)
                v = base * _commute_coeff(field, j, k, s)
                out[key] = out[key] + v if key in out else v
    return WeylOperator(field, out)


def prop_mult_coefficient(a: WeylOperator, b: WeylOperator, m: int, n: int) -> PiFieldElem:
    """c_mn = sum a_ij b_(m+s-i)(n+s-j) j! (m+s-i)! / (pi^s s! (j-s)! (m-i)!)."""
    field = a.field
    acc = field.zero()
    for (i, j), ca in a.terms.items():
        if i > m:
            continue
        for s in range(j + 1):
            k, l = m + s - i, n + s - j
            if l < 0:
                continue
            cb = b.terms.get((k, l))
            if cb is None:
                continue
            c = Fraction(factorial(j) * factorial(k), factorial(s) * factorial(j - s) * factorial(m - i))
            acc = acc + ca * cb * field.monomial(c, -s)
    return acc


def rho(a: WeylOperator) -> WeylOperator:
    """Fourier automorphism: x -> d, d -> -x, then normal ordering."""
    field = a.field
    out = WeylOperator(field)
    for (i, j), c in a.terms.items():
        img = weyl_mul(WeylOperator.d(field, i), WeylOperator.x(field, j))
        out = out + img.scale(c * (-1) ** j)
    return out


def rho_closed_form(a: WeylOperator) -> WeylOperator:
    """Closed form of rho: the coefficient at x^I d^J is
    sum_k (-1)^(I+k) (J+k)! (I+k)! / (pi^k k! I! J!) c_(J+k)(I+k)."""
    field = a.field
    out: dict = {}
    for (i, j), c in a.terms.items():
        # term c x^i d^j feeds (I, J) = (j - k, i - k)
        for k in range(min(i, j) + 1):
            I, J = j - k, i - k
            coef = Fraction((-1) ** (I + k) * factorial(J + k) * factorial(I + k),
                            factorial(k) * factorial(I) * factorial(J))
            v = c * field.monomial(coef, -k)
            out[(I, J)] = out[(I, J)] + v if (I, J) in out else v
    return WeylOperator(field, out)


def sign_substitution(a: WeylOperator) -> WeylOperator:
    """x -> -x, d -> -d."""
    return WeylOperator(a.field, {(i, j): c if (i + j) % 2 == 0 else -c for (i, j), c in a.terms.items()})


def random_operator(field: PiField, rng: random.Random, max_deg: int = 6, n_terms: int = 3,
                    max_coeff: int = 5) -> WeylOperator:
    terms = {}
    for _ in range(n_terms):
        key = (rng.randint(0, max_deg), rng.randint(0, max_deg))
        c = rng.randint(-max_coeff, max_coeff) or 1
        terms[key] = field.monomial(c, rng.randint(-2, 2))
    return WeylOperator(field, terms)


# --------------------------------------------------------------------------
# action on modules
# --------------------------------------------------------------------------


def module_derivation(M: SigmaNablaModule, v: Sequence[Poly]) -> list[Poly]:
    """D(v)_i = v_i' + sum_j N_ij v_j, the connection with dx stripped."""
    r = M.rank
    return [sum((M.connection[i][j] * v[j] for j in range(r)), v[i].derivative()) for i in range(r)]


def act(a: WeylOperator, M: SigmaNablaModule, v: Sequence[Poly]) -> list[Poly]:
    """x acts by multiplication, d by D/pi."""
    field = M.field
    pinv = field.monomial(1, -1)
    by_j: dict = {}
    for (i, j), c in a.terms.items():
        by_j.setdefault(j, []).append((i, c))
    out = [Poly(field) for _ in range(M.rank)]
    cur = list(v)
    for j in range(max(by_j, default=-1) + 1):
        if j:
            cur = [f * pinv for f in module_derivation(M, cur)]
        for i, c in by_j.get(j, []):
            shift = Poly(field, [0] * i + [c])
            out = [o + shift * f for o, f in zip(out, cur)]
    return out


# --------------------------------------------------------------------------
# Frobenius-commutation series
# --------------------------------------------------------------------------


def buildinF_series(q: int, N: int, p: int | None = None) -> TruncatedSeries:
    """exp(-pi x + pi x^q) through degree N, with its decay certificate."""
    from .sigma_nabla import _prime_of

    p = p or _prime_of(q)
    field = pi_field(p)
    f = Poly(field, [0, -1] + [0] * (q - 2) + [1]) * field.pi()
    return exp_poly(f, N, tail_slope=dwork_slope(p, q, 1))


# --------------------------------------------------------------------------
# fibers of the Fourier transform
# --------------------------------------------------------------------------


@dataclass
class FourierFiberReport:
    a: object
    dim: int
    charpoly: CharPoly | None
    source: str  # "cohomology" (identified against the oracle) or "oracle"
    discrepancy: object = None
    weight_ok: bool | None = None
    worst_weight_deviation: float | None = None

    def to_json(self) -> dict:
        a = self.a.coeffs() if isinstance(self.a, FFElem) else self.a
        return {"a": a, "dim": self.dim, "source": self.source,
                "charpoly": self.charpoly.to_json() if self.charpoly else None,
                "discrepancy_vq": None if self.discrepancy is None else
                ("inf" if self.discrepancy == INF else str(Fraction(self.discrepancy))),
                "weight_ok": self.weight_ok,
                "worst_weight_deviation": None if self.worst_weight_deviation is None
                else f"{self.worst_weight_deviation:.12g}"}


def fourier_fiber(M: SigmaNablaModule, a, N: int | None = None, weight_tol: float = 1e-6,
                  threshold=8) -> FourierFiberReport:
    """dim and det(1 - F t) of H^1(M (x) L_{a x}).

    Integer a: computed on the cohomology side and identified with the oracle.
    a in F_{p^2} (digit list or FFElem): the presentation fixes the dimension
    (the leading term of the connection does not see a once deg P >= 2) and the
    characteristic polynomial comes from the oracle over F_{p^2}.
    """
    if M.twists is None:
        raise RegimeError("fibers are computed for sums of Dwork twists")
    p = M.p
    if isinstance(a, (FFElem, list, tuple)):
        digits = a.coeffs() if isinstance(a, FFElem) else list(a)
        if len(digits) <= 1:
            return fourier_fiber(M, int(digits[0]) if digits else 0, N, weight_tol, threshold)
        pres = H1Presentation(M)
        if pres.d < 2:
            raise RegimeError("extension fibers need the twist degree to be at least 2")
        dim = pres.dim
        cps = []
        for t in M.twists:
            coeffs = [[c] for c in t.coeffs] + [[0]] * max(0, 2 - len(t.coeffs))
            coeffs[1] = [(coeffs[1][0] + digits[0]) % p] + list(digits[1:])
            sums = [char_sum(coeffs, p, n, base_degree=2) for n in range(1, t.degree + 1)]
            cps.append(l_poly_from_sums(sums, t.degree - 1, p, q=p * p))
        coeffs = cps[0]
        for extra in cps[1:]:
            coeffs = coeffs * extra
        if coeffs.degree != dim:
            raise RegimeError(f"oracle degree {coeffs.degree} differs from presentation dimension {dim}")
        cp = CharPoly(coeffs.coeffs, p, p * p, M.tate)
        verdict = weight_check(cp, 1 + 2 * M.tate, weight_tol)
        return FourierFiberReport(a, dim, cp, "oracle", None, verdict.passed, verdict.worst_deviation)
    a = int(a)
    N = N or max(M.trunc_order, 1)
    twisted = tensor(M, make_dwork_module([0, a], M.q, N, p)) if a else M
    pres = H1Presentation(twisted)
    if pres.dim == 0:
        return FourierFiberReport(a, 0, CharPoly([CycloElem.rational(p, 1)], p, M.q, M.tate), "cohomology",
                                  INF, True, 0.0)
    res = frobenius_on_h1(twisted)
    lpolys = []
    for t in twisted.twists:
        sums = module_sum_series([t], p, t.degree, 0)
        lpolys.append(l_poly_from_sums(sums, t.degree - 1, p, q=M.q))
    L = lpolys[0]
    for extra in lpolys[1:]:
        L = L * extra
    exact = [c * Fraction(M.q) ** (k * M.tate) for k, c in enumerate(L.coeffs)]
    cp, disc = identify_charpoly(res.charpoly, exact, threshold)
    verdict = weight_check(cp, 1 + 2 * M.tate, weight_tol)
    return FourierFiberReport(a, pres.dim, cp, "cohomology", disc, verdict.passed, verdict.worst_deviation)


# --------------------------------------------------------------------------
# surjectivity probe for the naive transform
# --------------------------------------------------------------------------


@dataclass
class ProbeResult:
    w: list  # w_0..w_L, each a rank-vector of Poly
    residual_valuation: object
    bound: object

    @property
    def ok(self) -> bool:
        return self.residual_valuation >= self.bound


def notnaive_surjectivity_probe(M: SigmaNablaModule, v: Sequence[Sequence[Poly]], L: int,
                                bound=10) -> ProbeResult:
    """Check the telescoping identity behind surjectivity onto coker nabla_x.

    On M (x) L_{s x}, nabla_x(u s^i) = (D u) s^i + mu u s^(i+1) with mu = -pi.
    With w_i = sum_j (-1)^j mu^-(j+1) D^j v_(i+j+1) one has, mod s^(L+1),
    nabla_x w = (v - v_0) + (sum_j (-1)^j mu^-(j+1) D^(j+1) v_(j+1)) s^0.
    The residual of that identity is returned as a valuation (inf when it vanishes).
    """
    field = M.field
    r = M.rank
    mu = -field.pi()
    mu_inv = mu.inverse()
    v = [list(vi) for vi in v][: L + 1]
    v += [[Poly(field)] * r for _ in range(L + 1 - len(v))]
    # D^j v_k, cached
    Dpow: dict = {}

    def Dj(j, k):
        if (j, k) not in Dpow:
            Dpow[(j, k)] = v[k] if j == 0 else module_derivation(M, Dj(j - 1, k))
        return Dpow[(j, k)]

    def coef(j):
        return (mu_inv ** (j + 1)) * (-1) ** j

    zero = [Poly(field)] * r
    w = []
    for i in range(L + 1):
        acc = list(zero)
        for j in range(L - i):
            acc = [a + f * coef(j) for a, f in zip(acc, Dj(j, i + j + 1))]
        w.append(acc)
    # nabla_x w, coefficient of s^i for i = 0..L+1
    nab = []
    for i in range(L + 2):
        acc = module_derivation(M, w[i]) if i <= L else list(zero)
        if i >= 1:
            acc = [a + f * mu for a, f in zip(acc, w[i - 1])]
        nab.append(acc)
    corr = list(zero)
    for j in range(L):
        corr = [a + f * coef(j) for a, f in zip(corr, Dj(j + 1, j + 1))]
    expected = [corr] + [v[i] for i in range(1, L + 1)] + [zero]
    worst = INF
    for got, want in zip(nab, expected):
        for g, e in zip(got, want):
            diff = g - e
            for c in diff.coeffs:
                worst = min(worst, pi_valuation(c))
    return ProbeResult(w, worst, bound)


def random_probe_sample(M: SigmaNablaModule, rng: random.Random, L: int, max_deg: int = 4,
                        max_coeff: int = 5) -> list[list[Poly]]:
    field = M.field
    return [[Poly(field, [rng.randint(-max_coeff, max_coeff) for _ in range(rng.randint(0, max_deg) + 1)])
             for _ in range(M.rank)] for _ in range(L + 1)]
