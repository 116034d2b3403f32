"""How the certified precision of det(1 - F t) grows with the truncation N."""
import argparse

from padicweil.cohomology import PrecisionError, charpoly_precision, frobenius_on_h1
from padicweil.sigma_nabla import make_dwork_module


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--P", type=int, nargs="+", default=[0, 0, 1])
    ap.add_argument("--N", type=int, nargs="+", default=[20, 40, 80, 160, 320])
    args = ap.parse_args()
    for N in args.N:
        M = make_dwork_module(args.P, args.p, N)
        try:
            prec = charpoly_precision(frobenius_on_h1(M, N=N).charpoly)
        except PrecisionError as exc:
            prec = f"fail ({exc.achieved})"
        print(f"N={N:<5} precision {prec} v_q")


if __name__ == "__main__":
    main()
