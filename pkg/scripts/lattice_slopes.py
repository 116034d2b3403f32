"""Dimension prediction vs computed dim H^1 and Newton slopes over the test lattice."""
from padicweil import checks


def main():
    for rec in checks.suite_dimension() + checks.suite_slopes():
        mark = "ok  " if rec.passed else "FAIL"
        print(f"{mark} {rec.name}  {rec.details}")


if __name__ == "__main__":
    main()
