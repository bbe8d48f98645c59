"""Normalized Robin determinants of the catenoid Fourier modes, closed form vs integrated."""
import argparse

from fbannulus import jacobi


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max", type=int, default=12)
    args = p.parse_args()
    print(f"{'n':>3} {'det':>22} {'det (integrated)':>22} {'ode resid':>10}")
    for n in range(args.n_max + 1):
        rep = jacobi.mode_report(n)
        integrated = jacobi.mode_bvp_determinant(n, integrate=True)
        flag = "  <- kernel" if rep["kernel_flag"] else ""
        print(f"{n:3d} {rep['det']:22.15g} {integrated:22.15g} {rep['residuals']['ode']:10.2e}{flag}")


if __name__ == "__main__":
    main()
