"""(sigma, nabla)-modules over the truncated dagger algebra K<x>^dagger.

A module of rank r is stored through its matrices on a basis e_1..e_r:

    nabla e_j = sum_i N_ij e_i (x) dx        (N polynomial)
    F e_j     = sum_i Phi_ij e_i             (Phi truncated series)

with the standard Frobenius lift x -> x^q acting as the identity on K.

Dwork twists L_P have Frobenius exp(pi (P(x) - P(x^q))), so their fibre at a
Teichmuller point t is zeta^{Tr P(t)} with zeta = 1 + pi + ...; compatibility
of Frobenius with the connection then forces nabla e = -pi P'(x) e (x) dx.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from typing import Sequence

from .dagger_series import (
    Poly,
    TruncatedSeries,
    TruncationError,
    dwork_slope,
    exp_poly,
)
from .numeric_core import (
    INF,
    FFElem,
    PiAdicApprox,
    PiField,
    PiFieldElem,
    pi_field,
    pi_valuation,
)


class RegimeError(ValueError):
    """Input outside the regime where an operation is defined."""


# --------------------------------------------------------------------------
# small matrix helpers over K
# --------------------------------------------------------------------------


def mat_mul(a, b, field: PiField):
    n, k, m = len(a), len(b), len(b[0])
    out = [[field.zero() for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for t in range(k):
            ait = a[i][t]
            if ait:
                row = b[t]
                for j in range(m):
                    if row[j]:
                        out[i][j] = out[i][j] + ait * row[j]
    return out


def mat_inv(a, field: PiField):
    n = len(a)
    work = [list(row) + [field.one() if i == j else field.zero() for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = min((r for r in range(col, n) if work[r][col]), key=lambda r: pi_valuation(work[r][col]), default=None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        work[col], work[piv] = work[piv], work[col]
        inv = work[col][col].inverse()
        work[col] = [v * inv for v in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def mat_det(a, field: PiField) -> PiFieldElem:
    n = len(a)
    work = [list(r) for r in a]
    det = field.one()
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col]), None)
        if piv is None:
            return field.zero()
        if piv != col:
            work[col], work[piv] = work[piv], work[col]
            det = -det
        det = det * work[col][col]
        inv = work[col][col].inverse()
        for r in range(col + 1, n):
            if work[r][col]:
                f = work[r][col] * inv
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return det


def charpoly_one_minus(a, field: PiField) -> list[PiFieldElem]:
    """Coefficients of det(1 - t A), constant term first (Faddeev-LeVerrier)."""
    n = len(a)
    if n == 0:
        return [field.one()]
    # det(tI - A) = sum c_k t^(n-k), c_0 = 1
    c = [field.one()]
    mk = [[field.zero()] * n for _ in range(n)]
    for k in range(1, n + 1):
        prev = c[-1]
        mk = mat_mul(a, mk, field)
        mk = [[mk[i][j] + (prev if i == j else field.zero()) for j in range(n)] for i in range(n)]
        am = mat_mul(a, mk, field)
        tr = sum((am[i][i] for i in range(n)), field.zero())
        c.append(-tr.scale(Fraction(1, k)))
    # det(1 - tA) = t^n det(1/t - A) -> same coefficient list
    return c


def kron(a, b, mul):
    ra, ca, rb, cb = len(a), len(a[0]), len(b), len(b[0])
    return [[mul(a[i // rb][j // cb], b[i % rb][j % cb]) for j in range(ca * cb)] for i in range(ra * rb)]


# --------------------------------------------------------------------------
# modules
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DworkTwist:
    """Integer polynomial P (ascending coefficients), normalized so P(0) = 0."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = [int(v) for v in self.coeffs]
        if c:
            c[0] = 0
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def poly(self, field: PiField) -> Poly:
        return Poly(field, list(self.coeffs))

    def __add__(self, other: "DworkTwist") -> "DworkTwist":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return DworkTwist(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "DworkTwist":
        return DworkTwist(tuple(-c for c in self.coeffs))


@dataclass(frozen=True)
class SigmaNablaModule:
    p: int
    q: int
    connection: tuple  # rank x rank of Poly
    frobenius: tuple  # rank x rank of TruncatedSeries
    label: str = ""
    # diagonal Dwork-twist summands when known; drives the oracle side
    twists: tuple | None = None
    tate: int = 0
    extra: dict = dc_field(default_factory=dict, compare=False, hash=False)

    @property
    def rank(self) -> int:
        return len(self.connection)

    @property
    def field(self) -> PiField:
        return pi_field(self.p)

    @property
    def trunc_order(self) -> int:
        return min(s.trunc_order for row in self.frobenius for s in row)

    def connection_degree(self) -> int:
        return max((e.degree for row in self.connection for e in row), default=-1)

    def truncate(self, N: int) -> "SigmaNablaModule":
        frob = tuple(tuple(s.truncate(N) for s in row) for row in self.frobenius)
        return replace(self, frobenius=frob)

    def is_constant(self) -> bool:
        return self.twists is not None and all(t.degree == 0 for t in self.twists)


def _check_q(p: int, q: int):
    k = q
    while k % p == 0 and k > 1:
        k //= p
    if k != 1:
        raise ValueError(f"q = {q} is not a power of p = {p}")


def make_dwork_module(P, q: int, N: int, p: int | None = None) -> SigmaNablaModule:
    """Rank-one module L_P: Frobenius exp(pi(P(x) - P(x^q))), connection -pi P'(x)."""
    P = P if isinstance(P, DworkTwist) else DworkTwist(tuple(P))
    p = p or _prime_of(q)
    _check_q(p, q)
    field = pi_field(p)
    d = P.degree
    if d * q > N:
        raise TruncationError(f"truncation {N} below deg(P)*q = {d * q}")
    pi = field.pi()
    poly = P.poly(field)
    conn = poly.derivative() * (-pi)
    exponent = (poly - poly.substitute_power(q)) * pi
    frob = exp_poly(exponent, N, tail_slope=dwork_slope(p, q, d))
    return SigmaNablaModule(p, q, ((conn,),), ((frob,),), label=f"L_{_poly_label(P.coeffs)}", twists=(P,))


def trivial_module(q: int, N: int, p: int | None = None) -> SigmaNablaModule:
    return make_dwork_module(DworkTwist(()), q, N, p)


def _prime_of(q: int) -> int:
    for cand in range(2, q + 1):
        if q % cand == 0:
            return cand
    raise ValueError("q must be >= 2")


def _poly_label(coeffs) -> str:
    terms = []
    for i, c in enumerate(coeffs):
        if c:
            mono = "1" if i == 0 else ("x" if i == 1 else f"x^{i}")
            terms.append(mono if c == 1 and i else f"{c}{'' if i == 0 else '*' + mono}")
    return "{" + ("+".join(terms) or "0") + "}"


def _same_base(m1: SigmaNablaModule, m2: SigmaNablaModule):
    if (m1.p, m1.q) != (m2.p, m2.q):
        raise ValueError("modules over different fields or Frobenius lifts")


def tensor(m1: SigmaNablaModule, m2: SigmaNablaModule) -> SigmaNablaModule:
    _same_base(m1, m2)
    if m1.trunc_order != m2.trunc_order:
        raise TruncationError("tensor factors have different truncation orders")
    field = m1.field
    r1, r2 = m1.rank, m2.rank
    zero = Poly(field)
    id1 = [[Poly(field, [1]) if i == j else zero for j in range(r1)] for i in range(r1)]
    id2 = [[Poly(field, [1]) if i == j else zero for j in range(r2)] for i in range(r2)]
    k1 = kron(m1.connection, id2, lambda a, b: a * b)
    k2 = kron(id1, m2.connection, lambda a, b: a * b)
    conn = tuple(tuple(a + b for a, b in zip(r_a, r_b)) for r_a, r_b in zip(k1, k2))
    frob = tuple(tuple(row) for row in kron(m1.frobenius, m2.frobenius, lambda a, b: a * b))
    twists = None
    if m1.twists is not None and m2.twists is not None:
        twists = tuple(a + b for a in m1.twists for b in m2.twists)
    return SigmaNablaModule(m1.p, m1.q, conn, frob, label=f"{m1.label}(x){m2.label}",
                            twists=twists, tate=m1.tate + m2.tate)


def direct_sum(m1: SigmaNablaModule, m2: SigmaNablaModule) -> SigmaNablaModule:
    _same_base(m1, m2)
    field = m1.field
    N = min(m1.trunc_order, m2.trunc_order)
    if m1.tate != m2.tate:
        raise ValueError("direct sums of different Tate twists are not tracked")
    r1, r2 = m1.rank, m2.rank
    zs = TruncatedSeries(field, [], N, tail_slope=INF)
    conn, frob = [], []
    for i in range(r1 + r2):
        crow, frow = [], []
        for j in range(r1 + r2):
            if i < r1 and j < r1:
                crow.append(m1.connection[i][j]); frow.append(m1.frobenius[i][j].truncate(N))
            elif i >= r1 and j >= r1:
                crow.append(m2.connection[i - r1][j - r1]); frow.append(m2.frobenius[i - r1][j - r1].truncate(N))
            else:
                crow.append(Poly(field)); frow.append(zs)
        conn.append(tuple(crow)); frob.append(tuple(frow))
    twists = m1.twists + m2.twists if m1.twists is not None and m2.twists is not None else None
    return SigmaNablaModule(m1.p, m1.q, tuple(conn), tuple(frob), label=f"{m1.label}+{m2.label}",
                            twists=twists, tate=m1.tate)


def series_matrix_inverse(mat, field: PiField):
    """Inverse of a matrix of truncated series with invertible constant term."""
    n = len(mat)
    N = min(s.trunc_order for row in mat for s in row)
    const = [[mat[i][j][0] for j in range(n)] for i in range(n)]
    c_inv = mat_inv(const, field)
    X = [None] * (N + 1)  # X[m] is the degree-m coefficient matrix
    ident = [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    for m in range(N + 1):
        rhs = ident if m == 0 else [[field.zero()] * n for _ in range(n)]
        for k in range(1, m + 1):
            Ak = [[mat[i][j][k] for j in range(n)] for i in range(n)]
            if any(a for row in Ak for a in row):
                prod = mat_mul(Ak, X[m - k], field)
                rhs = [[r - s for r, s in zip(rr, ss)] for rr, ss in zip(rhs, prod)]
        X[m] = mat_mul(c_inv, rhs, field)
    slope = min((s.tail_slope for row in mat for s in row if s.tail_slope is not None), default=None)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            s = TruncatedSeries(field, [X[m][i][j] for m in range(N + 1)], N)
            if slope is not None and slope != INF:
                s = TruncatedSeries(field, s.coeffs, N, slope, s.global_offset(slope))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def dual(m: SigmaNablaModule) -> SigmaNablaModule:
    """Negated-transpose connection, inverse-transpose Frobenius."""
    r = m.rank
    conn = tuple(tuple(-m.connection[j][i] for j in range(r)) for i in range(r))
    inv = series_matrix_inverse(m.frobenius, m.field)
    frob = tuple(tuple(inv[j][i] for j in range(r)) for i in range(r))
    twists = tuple(-t for t in m.twists) if m.twists is not None else None
    return SigmaNablaModule(m.p, m.q, conn, frob, label=f"({m.label})^v", twists=twists, tate=-m.tate)


def tate_twist(m: SigmaNablaModule, i: int) -> SigmaNablaModule:
    """M(-i): Frobenius multiplied by q^i."""
    factor = m.field(Fraction(m.q) ** i)
    frob = tuple(tuple(s.scale(factor) for s in row) for row in m.frobenius)
    return replace(m, frobenius=frob, tate=m.tate + i, label=f"{m.label}(-{i})" if i else m.label)


def with_frobenius(m: SigmaNablaModule, frob) -> SigmaNablaModule:
    return replace(m, frobenius=tuple(tuple(row) for row in frob), twists=None, label=m.label + "*")


# --------------------------------------------------------------------------
# compatibility of F with nabla
# --------------------------------------------------------------------------


@dataclass
class CompatibilityReport:
    window: int  # residual checked on degrees 0..window-1
    worst_valuation: object  # min valuation of a nonzero residual coefficient (inf if none)
    failing_entry: tuple | None  # (row, col, degree) of the lowest failing coefficient

    @property
    def ok(self) -> bool:
        return self.failing_entry is None


def check_compatibility(m: SigmaNablaModule) -> CompatibilityReport:
    """Residual Phi' + N Phi - q x^(q-1) Phi N(x^q) on the degrees the truncation determines."""
    field, r, q = m.field, m.rank, m.q
    N = m.trunc_order
    window = N  # Phi' is known through degree N-1
    phi = m.frobenius
    conn = m.connection
    conn_sigma = [[e.substitute_power(q) for e in row] for row in conn]
    worst, failing = INF, None
    for i in range(r):
        for j in range(r):
            res = [field.zero()] * window
            dphi = phi[i][j]
            for k in range(1, window + 1):
                res[k - 1] = res[k - 1] + dphi[k].scale(k)
            for t in range(r):
                nt = conn[i][t]
                for a, ca in enumerate(nt.coeffs):
                    if ca:
                        for k in range(window - a):
                            c = phi[t][j][k]
                            if c:
                                res[a + k] = res[a + k] + ca * c
                ns = conn_sigma[t][j]
                for b, cb in enumerate(ns.coeffs):
                    if cb:
                        for k in range(window - b - (q - 1)):
                            c = phi[i][t][k]
                            if c:
                                res[k + b + q - 1] = res[k + b + q - 1] - (c * cb).scale(q)
            for deg, c in enumerate(res):
                if c:
                    v = pi_valuation(c)
                    worst = min(worst, v)
                    if failing is None or deg < failing[2]:
                        failing = (i, j, deg)
                    break
    return CompatibilityReport(window, worst, failing)


# --------------------------------------------------------------------------
# Dwork's trick: horizontal sections
# --------------------------------------------------------------------------


def horizontal_basis(N_coeffs: Sequence, L: int, field: PiField):
    """Solve l U_l + sum_{i<l} N_i U_{l-1-i} = 0 with U_0 = I, for l = 1..L.

    ``N_coeffs[i]`` is the matrix coefficient of t^i in the connection matrix.
    Returns U_0..U_L; then (d/dt + N) U vanishes mod t^L.
    """
    n = len(N_coeffs[0]) if N_coeffs else 0
    ident = [[field.one() if i == j else field.zero() for j in range(n)] for i in range(n)]
    U = [ident]
    for l in range(1, L + 1):
        acc = [[field.zero()] * n for _ in range(n)]
        for i in range(min(l, len(N_coeffs))):
            prod = mat_mul(N_coeffs[i], U[l - 1 - i], field)
            acc = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, prod)]
        U.append([[-v.scale(Fraction(1, l)) for v in row] for row in acc])
    return U


def horizontal_residual(N_coeffs: Sequence, U: Sequence, L: int, field: PiField):
    """Coefficients of t^0..t^(L-1) of dU/dt + N U."""
    n = len(U[0])
    out = []
    for k in range(L):
        acc = [[v.scale(k + 1) for v in row] for row in U[k + 1]] if k + 1 < len(U) else \
            [[field.zero()] * n for _ in range(n)]
        for i in range(min(k + 1, len(N_coeffs))):
            prod = mat_mul(N_coeffs[i], U[k - i], field)
            acc = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, prod)]
        out.append(acc)
    return out


# --------------------------------------------------------------------------
# fibres at Teichmuller points
# --------------------------------------------------------------------------


def teichmuller_lift(a: int, p: int, m) -> PiAdicApprox:
    """Teichmuller representative of a in F_p, to valuation m (an integer approximation)."""
    field = pi_field(p)
    a %= p
    if a == 0:
        return PiAdicApprox.exact(field.zero())
    k = int(Fraction(m).__ceil__()) + 1
    mod = p**k
    w = a
    for _ in range(k + 1):
        w = pow(w, p, mod)
    return PiAdicApprox(field(w), k)


def fiber_frobenius(m: SigmaNablaModule, point, prec):
    """Matrix of F at the Teichmuller lift of a point of F_p, by summing the series."""
    if m.q != m.p:
        raise RegimeError("fibre Frobenius is implemented for q = p only")
    if isinstance(point, FFElem):
        if point.field.n != 1:
            raise RegimeError("points of F_{p^n}, n > 1, are served by the oracle side")
        point = point.rep[0] if point.rep else 0
    omega = teichmuller_lift(int(point), m.p, prec)
    out = []
    for row in m.frobenius:
        vals = []
        for s in row:
            v = s.evaluate(omega)
            if v.known_mod < prec:
                raise TruncationError(f"truncation {s.trunc_order} gives only valuation {v.known_mod} < {prec}")
            vals.append(PiAdicApprox(v.value, prec))
        out.append(vals)
    return out
