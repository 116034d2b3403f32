"""Module spec files and deterministic JSON reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .numeric_core import INF, CycloElem, complex_embeddings, is_prime, pi_field, pi_from_json
from .sigma_nabla import DworkTwist, RegimeError, SigmaNablaModule, direct_sum, make_dwork_module, tate_twist

MAX_RANK = 4
MAX_DEGREE = 8
MAX_PRIME = 13

_TOP_KEYS = {"p", "q", "P", "base", "trunc", "precision", "tate", "label"}
_BASE_KEYS = {"rank", "twists", "connection", "frobenius"}


class SpecError(ValueError):
    pass


def _int_list(obj, what: str) -> list[int]:
    if not isinstance(obj, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in obj):
        raise SpecError(f"{what} must be a list of integers")
    return list(obj)


@dataclass
class ModuleSpecFile:
    """Validated module spec file: a twist P over an optional base sum of Dwork twists."""

    p: int
    q: int
    P: list
    base_twists: list = field(default_factory=list)
    trunc: int | None = None
    precision: Fraction | None = None
    tate: int = 0
    label: str = ""

    @classmethod
    def from_json(cls, doc) -> "ModuleSpecFile":
        if not isinstance(doc, dict):
            raise SpecError("spec must be a JSON object")
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise SpecError(f"unknown fields: {sorted(unknown)}")
        if "p" not in doc or "P" not in doc:
            raise SpecError("fields 'p' and 'P' are required")
        p = doc["p"]
        if not isinstance(p, int) or not is_prime(p):
            raise SpecError("p must be a prime integer")
        if p > MAX_PRIME:
            raise SpecError(f"p = {p} exceeds the cap {MAX_PRIME}")
        q = doc.get("q", p)
        if not isinstance(q, int) or q < p or not _is_power(q, p):
            raise SpecError(f"q = {q} is not a power of p = {p}")
        P = _int_list(doc["P"], "P")
        if len(P) - 1 > MAX_DEGREE:
            raise SpecError(f"deg P = {len(P) - 1} exceeds the cap {MAX_DEGREE}")
        base_twists: list = []
        if "base" in doc:
            base = doc["base"]
            if not isinstance(base, dict):
                raise SpecError("base must be an object")
            unknown = set(base) - _BASE_KEYS
            if unknown:
                raise SpecError(f"unknown base fields: {sorted(unknown)}")
            if base.get("frobenius", "dwork") != "dwork":
                raise SpecError("only the 'dwork' Frobenius construction is supported")
            if not isinstance(base.get("twists"), list) or not base["twists"]:
                raise SpecError("base.twists must be a non-empty list of integer polynomials")
            base_twists = [_int_list(t, "base twist") for t in base["twists"]]
            rank = base.get("rank", len(base_twists))
            if rank != len(base_twists):
                raise SpecError(f"base.rank = {rank} but {len(base_twists)} twists given")
            if rank > MAX_RANK:
                raise SpecError(f"rank {rank} exceeds the cap {MAX_RANK}")
            if any(len(t) - 1 > MAX_DEGREE for t in base_twists):
                raise SpecError(f"base twist degree exceeds the cap {MAX_DEGREE}")
            if "connection" in base:
                _check_connection(base["connection"], base_twists, p)
        trunc = doc.get("trunc")
        if trunc is not None and (not isinstance(trunc, int) or trunc < 1):
            raise SpecError("trunc must be a positive integer")
        prec = doc.get("precision")
        if prec is not None:
            try:
                prec = Fraction(str(prec))
            except (ValueError, ZeroDivisionError):
                raise SpecError("precision must be a rational number")
        tate = doc.get("tate", 0)
        if not isinstance(tate, int):
            raise SpecError("tate must be an integer")
        label = doc.get("label", "")
        if not isinstance(label, str):
            raise SpecError("label must be a string")
        return cls(p, q, P, base_twists, trunc, prec, tate, label)

    @classmethod
    def load(cls, path: str) -> "ModuleSpecFile":
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec: {exc}")
        return cls.from_json(doc)

    @property
    def summands(self) -> list[list[int]]:
        """Twists of the direct summands of M0 (x) L_P."""
        if not self.base_twists:
            return [list(self.P)]
        n = max(len(self.P), max(len(t) for t in self.base_twists))
        pad = lambda t: list(t) + [0] * (n - len(t))
        return [[a + b for a, b in zip(pad(t), pad(self.P))] for t in self.base_twists]

    @property
    def rank(self) -> int:
        return max(len(self.base_twists), 1)

    @property
    def degree(self) -> int:
        return DworkTwist(tuple(self.P)).degree

    def check_regime(self):
        d = self.degree
        if d and d % self.p == 0:
            raise RegimeError(f"deg P = {d} is divisible by p = {self.p}")
        for t in self.base_twists:
            b = DworkTwist(tuple(t)).degree
            if b and b % self.p == 0:
                raise RegimeError(f"base twist of degree {b} divisible by p: its break is not its degree")
            if d and b >= d:
                raise RegimeError(f"base break {b} is not below deg P = {d}")

    def build(self, N: int) -> SigmaNablaModule:
        mods = [make_dwork_module(t, self.q, N, self.p) for t in self.summands]
        M = mods[0]
        for extra in mods[1:]:
            M = direct_sum(M, extra)
        return tate_twist(M, self.tate) if self.tate else M

    def to_json(self) -> dict:
        out = {"p": self.p, "q": self.q, "P": self.P}
        if self.base_twists:
            out["base"] = {"rank": len(self.base_twists), "twists": self.base_twists}
        if self.trunc is not None:
            out["trunc"] = self.trunc
        if self.precision is not None:
            out["precision"] = str(self.precision)
        if self.tate:
            out["tate"] = self.tate
        if self.label:
            out["label"] = self.label
        return out


def _is_power(q: int, p: int) -> bool:
    while q % p == 0:
        q //= p
    return q == 1


def _check_connection(conn, twists, p):
    """A given connection must equal the one the twists define: -pi Q' on the diagonal."""
    field = pi_field(p)
    r = len(twists)
    if not isinstance(conn, list) or len(conn) != r or any(not isinstance(row, list) or len(row) != r for row in conn):
        raise SpecError("base.connection must be a rank x rank matrix")
    for i in range(r):
        for j in range(r):
            entry = conn[i][j]
            if not isinstance(entry, list):
                raise SpecError("connection entries are lists of coefficients")
            coeffs = []
            for c in entry:
                if isinstance(c, int):
                    coeffs.append(field(c))
                else:
                    try:
                        coeffs.append(pi_from_json(field, c))
                    except (TypeError, ValueError, ZeroDivisionError):
                        raise SpecError(f"bad connection coefficient {c!r}")
            while coeffs and not coeffs[-1]:
                coeffs.pop()
            want = []
            if i == j:
                t = twists[i]
                want = [field.monomial(-k * t[k], 1) for k in range(1, len(t))]
                while want and not want[-1]:
                    want.pop()
            if coeffs != want:
                raise SpecError(f"connection entry ({i},{j}) does not match the Dwork-twist Frobenius directive")


# --------------------------------------------------------------------------
# serialization helpers
# --------------------------------------------------------------------------


def fmt_num(v):
    if v is None:
        return None
    if v == INF:
        return "inf"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(Fraction(v))


def cyclo_json(x: CycloElem) -> dict:
    """Exact coordinates plus the complex moduli at every embedding."""
    mods = [f"{abs(z):.12g}" for z in complex_embeddings(x)]
    norm2 = x * x.conjugate()
    exact = None
    if all(c == 0 for c in norm2.coords[1:]):
        exact = str(norm2.coords[0])
    return {"coords": x.to_json(), "moduli": mods, "squared_modulus": exact}


def dump_report(doc: dict, path: str):
    text = json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


@dataclass
class VerifyReport:
    suite: str
    records: list
    parameters: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self, timings: bool = False) -> dict:
        recs = sorted(self.records, key=lambda r: (r.name, json.dumps(r.inputs, sort_keys=True)))
        return {"command": "verify", "suite": self.suite, "parameters": self.parameters,
                "checks": [r.to_json(timings) for r in recs],
                "summary": {"total": len(recs), "passed": sum(r.passed for r in recs),
                            "failed": [r.name for r in recs if not r.passed],
                            "status": "pass" if self.passed else "fail"}}
