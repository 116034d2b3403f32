"""Fibers of the Fourier transform of L_{x^3} over F_5, plus one F_25 point."""
import json

from padicweil.sigma_nabla import make_dwork_module
from padicweil.weyl_fourier import fourier_fiber


def main():
    M = make_dwork_module([0, 0, 0, 1], 5, 375)
    for a in [0, 1, 2, 3, 4, [0, 1]]:
        rep = fourier_fiber(M, a)
        print(json.dumps({"a": a, "dim": rep.dim, "source": rep.source,
                          "weight_ok": rep.weight_ok}, sort_keys=True))


if __name__ == "__main__":
    main()
