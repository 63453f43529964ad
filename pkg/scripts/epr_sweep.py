"""Sweep the two-mode Gaussian over (sigma, Omega) and report where the
position-momentum product is smallest for each sigma.

    python scripts/epr_sweep.py --steps 20 --out epr.csv
"""

import argparse

import numpy as np

from minunc.cli import SWEEP_FIELDS, fmt, sweep_rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--points", type=int, default=256)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    sigmas = np.linspace(0.5, 2.0, args.steps)
    omegas = np.linspace(0.1, 1.0, args.steps)
    rows = sweep_rows(sigmas, omegas, 1.0, args.points)

    for s in sigmas:
        mine = [r for r in rows if r["sigma"] == s]
        best = min(mine, key=lambda r: r["product"])
        print(f"sigma {s:.3f}: min product {best['product']:.6f} at Omega {best['omega']:.3f} (1/(4 sigma) = {1 / (4 * s):.3f})")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(",".join(SWEEP_FIELDS) + "\n")
            for r in rows:
                fh.write(",".join(fmt(r.get(f)) for f in SWEEP_FIELDS) + "\n")


if __name__ == "__main__":
    main()
