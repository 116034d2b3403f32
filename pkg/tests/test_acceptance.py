"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line (also collected
into the pytest terminal summary); run directly with ``python3 tests/test_acceptance.py``."""
import sys
import time

import pytest

from padicweil import checks

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running outside pytest
    ACCEPTANCE_LINES = []


def _report(num: int, title: str, records, extra: str = "") -> bool:
    ok = bool(records) and all(r.passed for r in records)
    failed = [r.name for r in records if not r.passed]
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {title}  [{len(records)} checks]"
    if extra:
        line += f"  {extra}"
    if failed:
        line += f"  failing: {', '.join(failed)}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def _min_prec(records):
    vals = [r.achieved_precision for r in records if r.achieved_precision not in (None, "inf")]
    return f"min precision {min(vals)} v_q" if vals else ""


def test_criterion_1_gauss_purity():
    recs = checks.suite_weights(primes=(3, 5, 7, 11), m=10, tol=1e-9, time_limit=10.0)
    assert _report(1, "Gauss-sum purity, p in {3,5,7,11}", recs, _min_prec(recs))


def test_criterion_2_trace_formula():
    recs = checks.suite_trace(n_max=4, m=8, time_limit=60.0)
    assert _report(2, "trace formula, n <= 4", recs, _min_prec(recs))


def test_criterion_3_dimension_formula():
    recs = checks.suite_dimension()
    assert _report(3, "dimension (d-1) rank over the lattice", recs)


def test_criterion_4_fourier_rank_constancy():
    recs = checks.suite_fourier(fibers=(0, 1, 2, 3, 4, (0, 1)), tol=1e-6)
    assert _report(4, "Fourier fibers of L_{x^3}, p = 5", recs)


def test_criterion_5_duality():
    recs = checks.suite_duality(primes=(3, 5, 7), m=8)
    assert _report(5, "duality alpha * alpha' = p", recs, _min_prec(recs))


def test_criterion_6_slope_bounds():
    recs = checks.suite_slopes()
    assert _report(6, "slopes in [0,1], Tate shifts", recs)


def test_criterion_7_weyl_suite():
    t0 = time.perf_counter()
    recs = checks.suite_weyl(seed=0, n_triples=200, time_limit=5.0)
    assert _report(7, "Weyl algebra and rho", recs, f"{time.perf_counter() - t0:.2f}s")


def test_criterion_8_dwork_trick():
    recs = checks.suite_dwork(seed=0, n_samples=20, L=40)
    assert _report(8, "horizontal sections mod t^40", recs)


def test_criterion_9_splitting_bridge():
    recs = checks.suite_bridge(primes=(3, 5), N=60, m=6)
    assert _report(9, "splitting series at 1 vs zeta_p", recs, _min_prec(recs))


def test_criterion_10_notnaive_probe():
    recs = checks.suite_notnaive(seed=0, n_samples=20, L=6)
    assert _report(10, "surjectivity probe at s-order 6", recs)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
