"""Continue the critical catenoid in t and record a(t), b(t) and the residuals."""
import argparse
import csv
import time

import numpy as np

from fbannulus import rotprofile as rp


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t-max", type=float, default=0.3)
    p.add_argument("--steps", type=int, default=13)
    p.add_argument("--out", default="results/continuation.csv")
    args = p.parse_args()

    ts = np.linspace(-args.t_max, args.t_max, args.steps)
    # continue outward from t = 0 in both directions so each solve is warm-started
    mid = args.steps // 2
    order = list(ts[mid:]) + list(ts[:mid][::-1])
    rows, guess = {}, None
    for t in order:
        if t == ts[mid] or t == ts[mid - 1]:
            guess = None
        start = time.perf_counter()
        try:
            sol = rp.solve_critical_catenoid(float(t), guess=guess)
        except rp.ConvergenceError as exc:
            rows[t] = [t, np.nan, np.nan, np.nan, np.nan, 0, str(exc)]
            continue
        guess = (sol.a, sol.b)
        rows[t] = [t, sol.a, sol.b, max(abs(sol.theta_plus), abs(sol.theta_minus)),
                   sol.max_mean_curvature, time.perf_counter() - start, ""]

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "a", "b", "max_theta", "max_abs_h", "seconds", "error"])
        for t in sorted(rows):
            w.writerow(rows[t])
    a = {round(t, 12): r[1] for t, r in rows.items()}
    asym = max(abs(a[round(t, 12)] - a[round(-t, 12)]) for t in ts if round(-t, 12) in a)
    print(f"{len(rows)} solves, max |a(t) - a(-t)| = {asym:.2e}")


if __name__ == "__main__":
    main()
