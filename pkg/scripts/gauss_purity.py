"""Frobenius on H^1(L_{x^2}) for a range of primes: precision reached, the
identified Gauss sum, and its complex absolute value."""
import argparse
import time

from padicweil.cohomology import charpoly_precision, frobenius_on_h1, identify_charpoly, weight_check
from padicweil.numeric_core import CycloElem
from padicweil.oracle_sums import char_sum
from padicweil.sigma_nabla import make_dwork_module


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7, 11])
    args = ap.parse_args()
    print(f"{'p':>3} {'N':>5} {'prec(v_q)':>10} {'max |dev|':>11} {'sec':>6}")
    for p in args.primes:
        t0 = time.perf_counter()
        res = frobenius_on_h1(make_dwork_module([0, 0, 1], p, 50 * p))
        # snap to the exact Gauss sum before taking complex absolute values
        exact, _ = identify_charpoly(res.charpoly, [CycloElem.rational(p, 1), char_sum([0, 0, 1], p, 1)])
        verdict = weight_check(exact, 1)
        print(f"{p:>3} {max(res.truncations):>5} {str(charpoly_precision(res.charpoly)):>10} "
              f"{verdict.worst_deviation:>11.2e} {time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
