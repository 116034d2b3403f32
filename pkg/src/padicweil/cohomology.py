"""de Rham cohomology of (sigma, nabla)-modules on the affine line.

H^1(M) = coker(nabla) is presented on the classes x^i e_j dx, 0 <= i <= d-2,
where d - 1 is the degree of the connection matrix and its top coefficient is
invertible (the twist dominates).  Frobenius acts on forms by

    v (x) dx  ->  F(v) (x) q x^(q-1) dx

and is reduced back onto that basis.  Precision is tracked by running the
reduction at two truncation orders and keeping the digits on which they agree.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .numeric_core import (
    INF,
    CycloElem,
    PiAdicApprox,
    PiFieldElem,
    complex_embeddings,
    embed_cyclo,
    pi_valuation,
)
from .oracle_sums import module_sum_series, power_sums_from_poly
from .sigma_nabla import (
    RegimeError,
    SigmaNablaModule,
    charpoly_one_minus,
    dual,
    mat_det,
    mat_inv,
)


class PrecisionError(ArithmeticError):
    def __init__(self, msg: str, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class IdentificationError(ArithmeticError):
    pass


def _vq(p: int, q: int) -> int:
    k, qq = 0, q
    while qq > 1:
        qq //= p
        k += 1
    return k


# --------------------------------------------------------------------------
# presentation of H^1 and the reduction
# --------------------------------------------------------------------------


class H1Presentation:
    """Basis of H^1(M) and the rewriting that reduces any form onto it."""

    def __init__(self, M: SigmaNablaModule):
        self.module = M
        field_, r = M.field, M.rank
        self.rank = r
        conn = M.connection
        deg = M.connection_degree()
        self.trivial = deg < 0
        if self.trivial:
            # nabla = d: every form x^m e dx is exact
            self.d = 0
            self.basis: list[tuple[int, int]] = []
            return
        self.d = deg + 1
        if self.d % M.p == 0:
            raise RegimeError(f"twist degree {self.d} is divisible by p = {M.p}")
        top = [[conn[i][j][deg] for j in range(r)] for i in range(r)]
        det = mat_det(top, field_)
        if det.is_zero():
            raise RegimeError("leading term of the connection is not invertible; twist does not dominate")
        if pi_valuation(det) != Fraction(r, M.p - 1):
            raise RegimeError("leading term of the connection is not pi times a unit")
        self.top_inv = mat_inv(top, field_)
        # (degree k, row i, col j, coefficient) for the non-leading terms
        self.lower = [(k, i, j, conn[i][j][k]) for k in range(deg) for i in range(r) for j in range(r)
                      if conn[i][j][k]]
        self.basis = [(i, j) for i in range(self.d - 1) for j in range(r)]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, form: Sequence[Sequence[PiFieldElem]]) -> list[PiFieldElem]:
        """Coordinates of sum_m sum_j form[m][j] x^m e_j dx in the basis.

        Repeatedly subtracts nabla(x^(m-d+1) T^{-1} u), T the leading coefficient,
        which clears degree m and pushes the remainder below it.
        """
        field_ = self.module.field
        r, d = self.rank, self.d
        if self.trivial:
            return []
        work = [list(v) for v in form]
        for m in range(len(work) - 1, d - 2, -1):
            u = work[m]
            if not any(u):
                continue
            w = [sum((self.top_inv[i][j] * u[j] for j in range(r) if u[j]), field_.zero()) for i in range(r)]
            base = m - d + 1
            for k, i, j, c in self.lower:
                if w[j]:
                    work[base + k][i] = work[base + k][i] - c * w[j]
            if base > 0:
                for j in range(r):
                    if w[j]:
                        work[m - d][j] = work[m - d][j] - w[j].scale(base)
            work[m] = [field_.zero()] * r
        coords = []
        for i, j in self.basis:
            coords.append(work[i][j] if i < len(work) else field_.zero())
        return coords

    def reduce_monomial(self, m: int, j: int) -> list[PiFieldElem]:
        field_ = self.module.field
        form = [[field_.zero()] * self.rank for _ in range(m + 1)]
        form[m][j] = field_.one()
        return self.reduce(form)

    def nabla(self, vec_poly: Sequence) -> list[list[PiFieldElem]]:
        """nabla of sum_j f_j e_j as a form (list over degree of rank-vectors)."""
        field_ = self.module.field
        conn = self.module.connection
        r = self.rank
        top = max((f.degree for f in vec_poly), default=-1) + max(self.d - 1, 0) + 1
        form = [[field_.zero()] * r for _ in range(max(top, 1))]
        for j, f in enumerate(vec_poly):
            for m, c in enumerate(f.coeffs):
                if m:
                    form[m - 1][j] = form[m - 1][j] + c.scale(m)
                for i in range(r):
                    for k, a in enumerate(conn[i][j].coeffs):
                        form[m + k][i] = form[m + k][i] + a * c
        return form


def h1_reduce(M: SigmaNablaModule, m: int, j: int = 0) -> list[PiFieldElem]:
    """Coordinates of the class of x^m e_j dx."""
    return H1Presentation(M).reduce_monomial(m, j)


# --------------------------------------------------------------------------
# characteristic polynomials
# --------------------------------------------------------------------------


@dataclass
class CharPoly:
    """det(1 - F t) on some cohomology group; coefficients constant term first.

    Coefficients are PiAdicApprox (cohomological side) or CycloElem (exact).
    """

    coeffs: list
    p: int
    q: int
    tate_twist: int = 0

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, CycloElem) for c in self.coeffs)

    def twisted(self, i: int) -> "CharPoly":
        """Tate twist by i: every inverse root picks up a factor q^i."""
        out = []
        for k, c in enumerate(self.coeffs):
            f = Fraction(self.q) ** (i * k)
            out.append(c * f if isinstance(c, CycloElem) else c * c.field(f))
        return CharPoly(out, self.p, self.q, self.tate_twist + i)

    def valuations(self) -> list:
        """Valuations in v_q units; approximate coefficients give certified values or None."""
        k = _vq(self.p, self.q)
        out = []
        for c in self.coeffs:
            if isinstance(c, CycloElem):
                v = c.valuation()
            else:
                v = pi_valuation(c.value) if c.is_certified_nonzero() else None
            out.append(v / k if v not in (None, INF) else v)
        return out

    def embedded(self, m) -> list[PiAdicApprox]:
        return [embed_cyclo(c, m) if isinstance(c, CycloElem) else c for c in self.coeffs]

    def inverse_roots(self, embedding: int = 0) -> list[complex]:
        """Inverse roots under the complex embedding zeta -> exp(2 pi i (embedding+1)/p)."""
        if not self.exact:
            raise ValueError("inverse roots need an exact characteristic polynomial")
        vals = [complex_embeddings(c)[embedding] for c in self.coeffs]
        while len(vals) > 1 and vals[-1] == 0:
            vals.pop()
        if len(vals) <= 1:
            return []
        roots = np.roots(vals[::-1])
        return [1 / z for z in roots]

    def to_json(self) -> dict:
        out = []
        for c in self.coeffs:
            if isinstance(c, CycloElem):
                out.append({"cyclo": c.to_json()})
            else:
                out.append({"pi_adic": c.value.to_json(), "known_mod": _num(c.known_mod)})
        return {"coeffs": out, "q": self.q, "tate_twist": self.tate_twist}


def _num(v):
    if v == INF:
        return "inf"
    if v is None:
        return None
    return str(Fraction(v))


def charpoly_product(a: CharPoly, b: CharPoly) -> CharPoly:
    out = [None] * (a.degree + b.degree + 1)
    for i, x in enumerate(a.coeffs):
        for j, y in enumerate(b.coeffs):
            out[i + j] = x * y if out[i + j] is None else out[i + j] + x * y
    return CharPoly(out, a.p, a.q, a.tate_twist)


# --------------------------------------------------------------------------
# Frobenius on H^1
# --------------------------------------------------------------------------


@dataclass
class FrobeniusOnH1:
    basis: list
    matrix: list  # PiAdicApprox entries
    charpoly: CharPoly
    truncations: tuple
    known_mod: object  # entrywise precision of the matrix
    exact_matrix: list = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


def _frobenius_matrix(M: SigmaNablaModule, pres: H1Presentation) -> list[list[PiFieldElem]]:
    field_, r, q = M.field, M.rank, M.q
    phi = M.frobenius
    qf = field_(q)
    cols = []
    for i, j in pres.basis:
        shift = q * i + q - 1
        top = M.trunc_order + shift
        form = [[field_.zero()] * r for _ in range(top + 1)]
        for l in range(r):
            s = phi[l][j]
            for k, c in enumerate(s.coeffs):
                if c:
                    form[k + shift][l] = c * qf
        cols.append(pres.reduce(form))
    n = len(pres.basis)
    return [[cols[c][row] for c in range(n)] for row in range(n)]


def default_truncation(M: SigmaNablaModule, target=10) -> int:
    """25 d q, raised if needed so the certified tail clears ``target`` v_q units."""
    d = max(M.connection_degree() + 1, 1)
    slope = Fraction(M.p - 1, d * M.p * M.q)
    need = (Fraction(target) * _vq(M.p, M.q) + 4) / slope
    return max(25 * d * M.q, math.ceil(need))


def frobenius_on_h1(M: SigmaNablaModule, N: int | None = None, m=None,
                    N_low: int | None = None) -> FrobeniusOnH1:
    """Matrix and det(1 - F t) of Frobenius on H^1(M).

    The matrix is computed with the Frobenius series truncated at N (default:
    the module's own order) and at N_low (default 3N/4); their agreement sets
    the reported precision.  ``m`` (v_q units) raises PrecisionError if missed.
    """
    pres = H1Presentation(M)
    p, q = M.p, M.q
    field_ = M.field
    N = N or M.trunc_order
    N_low = N_low or (3 * N) // 4
    if pres.dim == 0:
        cp = CharPoly([PiAdicApprox.exact(field_.one())], p, q, M.tate)
        return FrobeniusOnH1([], [], cp, (N_low, N), INF)
    A_hi = _frobenius_matrix(M.truncate(N), pres)
    A_lo = _frobenius_matrix(M.truncate(N_low), pres)
    n = pres.dim
    kappa = min(pi_valuation(A_hi[a][b] - A_lo[a][b]) for a in range(n) for b in range(n))
    # a cap from the certified tail of the Frobenius series, for the exact-agreement case
    slope = min((s.tail_slope for row in M.frobenius for s in row if s.tail_slope is not None), default=None)
    if slope not in (None, INF):
        worst_loss = min(min((pi_valuation(c) for c in pres.reduce_monomial(N + q * (pres.d - 1), j) if c),
                             default=INF) for j in range(M.rank))
        cap = slope * (N + 1) + _vq(p, q) + min(worst_loss, 0)
        kappa = min(kappa, cap)
    vmin = min(min(pi_valuation(A_hi[a][b]) for a in range(n) for b in range(n)), kappa)
    cp_hi = charpoly_one_minus(A_hi, field_)
    cp_lo = charpoly_one_minus(A_lo, field_)
    coeffs = [PiAdicApprox.exact(field_.one())]
    for k in range(1, n + 1):
        prop = kappa + (k - 1) * min(vmin, 0) if kappa != INF else INF
        known = min(pi_valuation(cp_hi[k] - cp_lo[k]), prop)
        coeffs.append(PiAdicApprox(cp_hi[k], known))
    cp = CharPoly(coeffs, p, q, M.tate)
    matrix = [[PiAdicApprox(A_hi[a][b], kappa) for b in range(n)] for a in range(n)]
    if m is not None:
        achieved = min(c.known_mod for c in coeffs[1:]) / _vq(p, q)
        if achieved < m:
            raise PrecisionError(f"achieved precision {achieved} < requested {m}", achieved)
    return FrobeniusOnH1(pres.basis, matrix, cp, (N_low, N), kappa, A_hi)


def charpoly_precision(cp: CharPoly):
    """Least known_mod over the non-constant coefficients, in v_q units."""
    k = _vq(cp.p, cp.q)
    vals = [c.known_mod for c in cp.coeffs[1:] if isinstance(c, PiAdicApprox)]
    return min(vals) / k if vals else INF


# --------------------------------------------------------------------------
# compact supports, breaks, Swan conductors
# --------------------------------------------------------------------------


@dataclass
class SwanData:
    breaks: dict  # break -> multiplicity

    @property
    def rank(self) -> int:
        return sum(self.breaks.values())

    @property
    def swan_total(self) -> Fraction:
        return sum((Fraction(b) * m for b, m in self.breaks.items()), Fraction(0))

    @property
    def max_break(self) -> Fraction:
        return max((Fraction(b) for b in self.breaks), default=Fraction(0))

    def to_json(self) -> dict:
        return {"breaks": {str(Fraction(b)): m for b, m in sorted(self.breaks.items())},
                "swan": str(self.swan_total)}


@dataclass
class PredictedCohomology:
    swan: SwanData
    euler_characteristic: int
    dim_h0: int
    dim_h1: int
    dim_h0_loc: int = 0
    dim_h1_loc: int = 0


def breaks_of(M: SigmaNablaModule) -> SwanData:
    """Breaks at infinity of a sum of Dwork twists: deg Q for each summand L_Q (p not dividing deg Q)."""
    if M.twists is None:
        raise RegimeError("breaks are only known for sums of Dwork twists")
    for t in M.twists:
        if t.degree and t.degree % M.p == 0:
            raise RegimeError(f"summand of degree {t.degree} divisible by p: break not read off the degree")
    return SwanData(dict(Counter(Fraction(t.degree) for t in M.twists)))


def swan_predict(m0: SwanData, d: int, p: int) -> PredictedCohomology:
    """Cohomology of M0 (x) L_P, deg P = d dominating every break of M0."""
    if d % p == 0:
        raise RegimeError(f"twist degree {d} divisible by p = {p}")
    if m0.breaks and m0.max_break >= d:
        raise RegimeError(f"break {m0.max_break} of the base module is not below d = {d}")
    rank = m0.rank
    swan = SwanData({Fraction(d): rank})
    chi = rank - int(swan.swan_total)
    return PredictedCohomology(swan, chi, 0, (d - 1) * rank)


def h1c_via_duality(M: SigmaNablaModule, N: int | None = None) -> CharPoly:
    """det(1 - F t | H^1_c(M)) with inverse roots q/beta, beta running over H^1(M^dual)."""
    Mv = dual(M)
    for mod in (M, Mv):
        if H1Presentation(mod).trivial:
            raise RegimeError("H^0 does not vanish (trivial connection); duality route refused")
    cp = frobenius_on_h1(Mv, N).charpoly
    D = cp.degree
    if D == 0:
        return CharPoly([cp.coeffs[0]], M.p, M.q, M.tate)
    top = cp.coeffs[D]
    field_ = M.field
    out = []
    for j in range(D + 1):
        num = cp.coeffs[D - j] * field_(Fraction(M.q) ** j)
        out.append(num.divide(top))
    return CharPoly(out, M.p, M.q, M.tate)


# --------------------------------------------------------------------------
# slopes and weights
# --------------------------------------------------------------------------


def lower_hull_slopes(points: Sequence[tuple]) -> list[Fraction]:
    """Slopes (with multiplicity) of the lower convex hull of (x, y) points."""
    pts = sorted((Fraction(x), Fraction(y)) for x, y in points)
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = (y2 - y1) / (x2 - x1)
        out.extend([s] * int(x2 - x1))
    return out


def newton_slopes(cp: CharPoly) -> list[Fraction]:
    """Newton slopes of det(1 - F t) in v_q units (valuations of the inverse roots)."""
    vals = cp.valuations()
    D = cp.degree
    if vals[0] is None or vals[-1] is None or vals[-1] == INF:
        raise PrecisionError("leading or constant coefficient not certified")
    pts = [(k, v) for k, v in enumerate(vals) if v is not None and v != INF]
    slopes = lower_hull_slopes(pts)
    if len(slopes) != D:
        raise PrecisionError("hull does not span the degree")
    # uncertified coefficients must sit on or above the hull
    k_q = _vq(cp.p, cp.q)
    for k, v in enumerate(vals):
        if v is None:
            bound = cp.coeffs[k].known_mod / k_q
            hull_y = vals[0] + sum(slopes[:k])
            if bound < hull_y:
                raise PrecisionError(f"coefficient {k} known only to {bound}; cannot certify a vertex")
    return slopes


@dataclass
class WeightVerdict:
    passed: bool
    weight: Fraction
    worst_deviation: float
    moduli: list


def weight_check(cp: CharPoly, w, tol: float = 1e-6) -> WeightVerdict:
    """Every inverse root under every complex embedding has modulus q^(w/2)."""
    if not cp.exact:
        raise ValueError("weight_check needs an exact characteristic polynomial")
    target = cp.q ** (float(w) / 2)
    worst, moduli = 0.0, []
    for e in range(cp.p - 1 if cp.p > 2 else 1):
        for a in cp.inverse_roots(e):
            moduli.append(abs(a))
            worst = max(worst, abs(abs(a) - target) / target)
    return WeightVerdict(bool(worst <= tol), Fraction(w), float(worst), [float(x) for x in moduli])


def identify_charpoly(cp: CharPoly, exact_coeffs: Sequence[CycloElem], threshold=8) -> tuple[CharPoly, object]:
    """Replace a p-adic CharPoly by the exact oracle one when they agree to ``threshold`` v_q units."""
    if len(exact_coeffs) != len(cp.coeffs):
        raise IdentificationError(f"degree mismatch: {cp.degree} vs {len(exact_coeffs) - 1}")
    k = _vq(cp.p, cp.q)
    worst = INF
    for a, b in zip(cp.coeffs, exact_coeffs):
        prec = a.known_mod if isinstance(a, PiAdicApprox) else INF
        target = min(prec, Fraction(threshold) * k + 1)
        disc = pi_valuation((a - embed_cyclo(b, target)).value) if isinstance(a, PiAdicApprox) else INF
        worst = min(worst, min(disc, prec) / k)
    if worst < threshold:
        raise IdentificationError(f"agreement only to {worst} < {threshold}")
    return CharPoly(list(exact_coeffs), cp.p, cp.q, cp.tate_twist), worst


# --------------------------------------------------------------------------
# trace formula
# --------------------------------------------------------------------------


@dataclass
class LefschetzRecord:
    n: int
    oracle: CycloElem
    discrepancy: object  # v_q units
    ok: bool


@dataclass
class LefschetzReport:
    records: list
    precision: object
    h1c: CharPoly | None
    h2c_rank: int

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.records)

    @property
    def failing(self) -> list[int]:
        return [r.n for r in self.records if not r.ok]


def compact_support_data(M: SigmaNablaModule, N: int | None = None):
    """(CharPoly on H^1_c or None, H^2_c eigenvalue exponent list) for the supported cases."""
    if M.is_constant():
        return None, M.rank
    pres = H1Presentation(M)
    if pres.trivial:
        raise RegimeError("constant connection without twist data")
    # H^0 and H^0_loc vanish, so forgetting supports identifies H^1_c with H^1
    return frobenius_on_h1(M, N).charpoly, 0


def lefschetz_verify(M: SigmaNablaModule, n_max: int, m, N: int | None = None,
                     sums: Sequence[CycloElem] | None = None) -> LefschetzReport:
    """Compare oracle sums S_n with sum_i (-1)^i Tr(F^n | H^i_c) for n = 1..n_max."""
    if M.q != M.p:
        raise RegimeError("trace formula verification is implemented for q = p")
    if sums is None:
        if M.twists is None:
            raise RegimeError("no oracle available for this module")
        sums = module_sum_series(M.twists, M.p, n_max, M.tate)
    k = _vq(M.p, M.q)
    cp, h2_rank = compact_support_data(M, N)
    field_ = M.field
    records = []
    if cp is not None:
        prec = min((c.known_mod for c in cp.coeffs[1:]), default=INF)
        zero = PiAdicApprox(field_.zero(), prec if prec != INF else Fraction(m) * k + 1)
        traces = power_sums_from_poly(cp.coeffs, n_max, zero)
    for n in range(1, n_max + 1):
        if cp is not None:
            coh = -traces[n - 1]
        else:
            coh = PiAdicApprox.exact(field_(h2_rank * Fraction(M.q) ** (n * (1 + M.tate))))
        orc = embed_cyclo(sums[n - 1], coh.known_mod if coh.known_mod != INF else Fraction(m) * k + 1)
        disc = (orc - coh).valuation() / k
        records.append(LefschetzRecord(n, sums[n - 1], disc, disc >= m))
    return LefschetzReport(records, m, cp, h2_rank)
