"""Near-zero singular values of the deformed catenoid's Jacobi form along t."""
import argparse
import json

import numpy as np

from fbannulus import spectrum


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t-max", type=float, default=0.2)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--K", type=int, default=32)
    p.add_argument("--out", default="results/probe.json")
    args = p.parse_args()

    cfg = spectrum.ProbeConfig(K=args.K)
    rows = spectrum.semicontinuity_probe(np.linspace(0, args.t_max, args.steps), cfg)
    for r in rows:
        print(f"t={r.t:.3f} near-zero {r.near_zero} per mode {r.per_mode} "
              f"mode-1 smallest {r.singular_values.get(1, [np.nan])[0]:.2e}")
    with open(args.out, "w") as fh:
        json.dump([r.__dict__ for r in rows], fh, indent=2, default=str)


if __name__ == "__main__":
    main()
