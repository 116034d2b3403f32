"""Command line: lfunction, fourier and verify, each writing one JSON report.

Exit status: 0 ok, 2 bad spec, 3 outside the supported regime, 4 a check failed.
"""
from __future__ import annotations

import argparse
import logging
import sys
import traceback
from fractions import Fraction

from .checks import SUITES, CheckRecord, run_suite
from .cohomology import (
    CharPoly,
    IdentificationError,
    PrecisionError,
    charpoly_precision,
    default_truncation,
    frobenius_on_h1,
    identify_charpoly,
    newton_slopes,
    weight_check,
)
from .dagger_series import TruncationError
from .numeric_core import INF, CycloElem, PiAdicApprox, embed_cyclo
from .oracle_sums import BudgetError, OracleInconsistency, l_poly_from_sums, module_sum_series, power_sums_from_poly
from .reports import ModuleSpecFile, SpecError, VerifyReport, cyclo_json, dump_report, fmt_num
from .sigma_nabla import RegimeError
from .weyl_fourier import fourier_fiber

EXIT_OK, EXIT_SPEC, EXIT_REGIME, EXIT_VERIFY = 0, 2, 3, 4
DEFAULT_PRECISION = 8

log = logging.getLogger("padicweil")


def _base_degree(p: int, q: int) -> int:
    k = 0
    while q > 1:
        q //= p
        k += 1
    return k


def _charpoly_json(cp: CharPoly) -> list:
    out = []
    for c in cp.coeffs:
        if isinstance(c, CycloElem):
            out.append({"exact": c.to_json()})
        else:
            out.append({"value": c.value.to_json(), "known_mod": fmt_num(c.known_mod)})
    return out


def _weights_json(cp: CharPoly, w) -> dict:
    verdict = weight_check(cp, w, 1e-6)
    roots = []
    for e in range(max(cp.p - 1, 1)):
        for z in cp.inverse_roots(e):
            roots.append(f"{abs(z):.12g}")
    return {"weight": str(Fraction(w)), "status": "pass" if verdict.passed else "fail",
            "worst_relative_deviation": f"{verdict.worst_deviation:.12g}", "moduli": roots,
            "expected_modulus": f"{cp.q ** (float(w) / 2):.12g}",
            "expected_squared_modulus": str(Fraction(cp.q) ** w if Fraction(w).denominator == 1 else "")}


def cmd_lfunction(spec: ModuleSpecFile, n_max: int, trunc=None, precision=None) -> tuple[dict, int]:
    spec.check_regime()
    p, q = spec.p, spec.q
    k = _base_degree(p, q)
    m = Fraction(precision if precision is not None else (spec.precision or DEFAULT_PRECISION))
    doc = {"command": "lfunction", "spec": spec.to_json(),
           "parameters": {"n_max": n_max, "precision_vq": str(m)}}
    d = spec.degree
    if d == 0:
        # constant modules: only H^2_c, det(1 - q^(1+tate) t) per summand
        sums = module_sum_series(spec.summands, p, n_max, spec.tate, k)
        lam = Fraction(q) ** (1 + spec.tate)
        expected = [CycloElem.rational(p, spec.rank * lam**n) for n in range(1, n_max + 1)]
        h2 = [CycloElem.rational(p, 1), CycloElem.rational(p, -lam)]
        cp2 = CharPoly(h2, p, q, spec.tate)
        ok = sums == expected
        doc["oracle"] = {"provenance": "oracle-exact", "sums": [cyclo_json(s) for s in sums],
                         "h1c_polynomial": [CycloElem.rational(p, 1).to_json()],
                         "h2c_factor": [c.to_json() for c in h2], "h2c_multiplicity": spec.rank}
        doc["cohomology"] = {"provenance": "exact", "dim_h1": 0, "dim_h2c": spec.rank,
                             "h2c_charpoly": _charpoly_json(cp2)}
        doc["comparison"] = {"sums_equal_point_counts": ok}
        doc["newton_slopes"] = {"h2c": [str(s) for s in newton_slopes(cp2)]}
        doc["weights"] = {"h2c": _weights_json(cp2, 2 + 2 * spec.tate)}
        doc["status"] = "pass" if ok else "fail"
        return doc, EXIT_OK if ok else EXIT_VERIFY
    expected_deg = (d - 1) * spec.rank
    D = max(n_max, expected_deg)
    sums = module_sum_series(spec.summands, p, D, spec.tate, k)
    L = l_poly_from_sums(sums, expected_deg, p, q=q)
    N = trunc or spec.trunc or default_truncation(spec.build(d * q))
    M = spec.build(N)
    res = frobenius_on_h1(M)
    cp = res.charpoly
    coeff_disc = []
    for c_coh, c_orc in zip(cp.coeffs, L.coeffs):
        target = c_coh.known_mod if c_coh.known_mod != INF else m * k + 1
        coeff_disc.append((c_coh - embed_cyclo(c_orc, target)).valuation() / k)
    zero = PiAdicApprox(M.field.zero(), min(c.known_mod for c in cp.coeffs[1:]))
    traces = power_sums_from_poly(cp.coeffs, n_max, zero)
    trace_disc = [((-traces[n]) - embed_cyclo(sums[n], zero.known_mod)).valuation() / k for n in range(n_max)]
    try:
        exact, ident = identify_charpoly(cp, L.coeffs, m)
    except IdentificationError as exc:
        exact, ident = None, str(exc)
    doc["oracle"] = {"provenance": "oracle-exact", "sums": [cyclo_json(s) for s in sums[:n_max]],
                     "sums_used_for_polynomial": D,
                     "l_polynomial": [c.to_json() for c in L.coeffs], "degree": L.degree}
    doc["cohomology"] = {"provenance": "precision-bounded", "dim_h1": res.dim,
                         "truncations": list(res.truncations), "precision_vq": fmt_num(charpoly_precision(cp)),
                         "charpoly": _charpoly_json(cp)}
    doc["comparison"] = {"coefficient_discrepancy_vq": [fmt_num(v) for v in coeff_disc],
                         "trace_discrepancy_vq": [fmt_num(v) for v in trace_disc],
                         "identified": exact is not None,
                         "identification": fmt_num(ident) if exact is not None else ident}
    doc["newton_slopes"] = [str(s) for s in newton_slopes(cp)]
    ok = all(v >= m for v in coeff_disc + trace_disc) and exact is not None and res.dim == L.degree
    if exact is not None:
        doc["weights"] = _weights_json(exact, 1 + 2 * spec.tate)
        ok = ok and doc["weights"]["status"] == "pass"
    doc["status"] = "pass" if ok else "fail"
    return doc, EXIT_OK if ok else EXIT_VERIFY


def parse_fibers(text: str, p: int) -> list:
    """'0,1,2:1' -> [0, 1, [2, 1]]; colon-separated digits name an element of F_{p^2}."""
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        try:
            if ":" in tok:
                digits = [int(x) % p for x in tok.split(":")]
                if len(digits) != 2:
                    raise SpecError(f"fiber {tok!r}: extension fibers are given by two digits over F_p")
                out.append(digits)
            else:
                out.append(int(tok))
        except ValueError:
            raise SpecError(f"bad fiber {tok!r}")
    return out


def cmd_fourier(spec: ModuleSpecFile, fibers: list, trunc=None) -> tuple[dict, int]:
    spec.check_regime()
    if spec.q != spec.p:
        raise RegimeError("Fourier fibers are computed for q = p")
    doc = {"command": "fourier", "spec": spec.to_json(), "parameters": {"fibers": fibers}}
    if not fibers:
        doc.update({"fibers": [], "constant_dimension": True, "status": "pass"})
        return doc, EXIT_OK
    d = max(spec.degree, 1)
    N = trunc or spec.trunc or 25 * d * spec.q
    M = spec.build(N)
    reps = [fourier_fiber(M, a) for a in fibers]
    dims = sorted({r.dim for r in reps})
    const = len(dims) == 1
    weights_ok = all(r.weight_ok for r in reps)
    doc["fibers"] = [r.to_json() for r in reps]
    doc["constant_dimension"] = const
    doc["dimensions"] = dims
    doc["all_weights_pass"] = weights_ok
    ok = const and weights_ok
    doc["status"] = "pass" if ok else "fail"
    return doc, EXIT_OK if ok else EXIT_VERIFY


def cmd_verify(suite: str, seed=0, trunc=None, precision=None, timings=False) -> tuple[dict, int]:
    names = SUITES if suite == "all" else (suite,)
    records = []
    for name in names:
        try:
            records.extend(run_suite(name, seed=seed, trunc=trunc, precision=precision))
        except Exception as exc:  # a crashed suite is a failed check, not a crashed run
            log.debug("suite %s raised", name, exc_info=True)
            records.append(CheckRecord(f"{name}/error", {}, False, None, None, "error",
                                       {"exception": f"{type(exc).__name__}: {exc}"}))
    params = {"seed": seed, "trunc": trunc, "precision": None if precision is None else str(precision)}
    rep = VerifyReport(suite, records, params)
    return rep.to_json(timings), EXIT_OK if rep.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padicweil", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("--out", required=True, help="output JSON file")
        sp.add_argument("--trunc", type=int, default=None, help="truncation order of the Frobenius series")
        sp.add_argument("--precision", type=Fraction, default=None, help="target precision in v_q units")
        sp.add_argument("--seed", type=int, default=0)

    lf = sub.add_parser("lfunction", help="L-function of a module: oracle vs cohomology")
    lf.add_argument("--spec", required=True)
    lf.add_argument("--n-max", type=int, required=True)
    common(lf)
    fo = sub.add_parser("fourier", help="fibers of the Fourier transform")
    fo.add_argument("--spec", required=True)
    fo.add_argument("--fibers", required=True, help="comma list; 'a0:a1' for an element of F_{p^2}")
    common(fo)
    ve = sub.add_parser("verify", help="run verification suites")
    ve.add_argument("--suite", required=True, choices=SUITES + ("all",))
    ve.add_argument("--timings", action="store_true", help="include runtimes (reports stop being byte-stable)")
    common(ve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.cmd == "verify":
            doc, code = cmd_verify(args.suite, args.seed, args.trunc, args.precision, args.timings)
        else:
            spec = ModuleSpecFile.load(args.spec)
            if args.cmd == "lfunction":
                if args.n_max < 1:
                    raise SpecError("--n-max must be positive")
                doc, code = cmd_lfunction(spec, args.n_max, args.trunc, args.precision)
            else:
                doc, code = cmd_fourier(spec, parse_fibers(args.fibers, spec.p), args.trunc)
    except (SpecError, BudgetError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except RegimeError as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (OracleInconsistency, PrecisionError, TruncationError, IdentificationError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        if args.verbose:
            traceback.print_exc()
        return EXIT_VERIFY
    dump_report(doc, args.out)
    if code:
        print(f"{args.cmd}: checks failed, see {args.out}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
