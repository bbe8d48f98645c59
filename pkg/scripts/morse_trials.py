"""Euler characteristics of S2 and RP2 from critical points of random polynomials."""
import argparse
from collections import Counter

from fbannulus import degree


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    for m in ("S2", "RP2"):
        trials = [degree.morse_trial(m, k, args.seed) for k in range(args.trials)]
        values = Counter(t.value for t in trials if not t.discarded)
        counts = Counter(t.n_critical for t in trials)
        resampled = sum(t.resamples for t in trials)
        print(f"{m}: values {dict(values)}, critical point counts {dict(sorted(counts.items()))}, "
              f"resamples {resampled}")


if __name__ == "__main__":
    main()
