"""Regenerate tests/fixtures/g0_qubit_pauli.json.

G0 is a certified-ish lower bound on the minimum HUR/SR gap for (sigma_x,
sigma_y) over two-qubit pure states whose Schmidt coefficients are all at
least delta.  It is the dense-scan minimum minus the largest change between
neighbouring grid points along each axis, so the optimiser must never
report a gap below it.

    python scripts/dense_scan_g0.py [--delta 0.3] [--out PATH]
"""

import argparse
import json
import time
from pathlib import Path

from minunc.linalg import SIGMA_X, SIGMA_Y
from minunc.oracles import qubit_gap_scan

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "g0_qubit_pauli.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--delta", type=float, default=0.3)
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--grid", type=int, nargs=3, default=[121, 121, 241], metavar=("NC", "NTHETA", "NPHI"))
    args = ap.parse_args()

    out = {"observables": "sigma_x, sigma_y", "generator": "scripts/dense_scan_g0.py"}
    for mode in ("SR", "HUR"):
        t0 = time.time()
        scan = qubit_gap_scan(SIGMA_X, SIGMA_Y, args.delta, mode, *args.grid)
        out[mode] = scan.to_dict()
        print(f"{mode}: scan min {scan.scan_min:.6f}  margin {scan.margin:.6f}  G0 {scan.g0:.6f}  ({time.time() - t0:.1f}s)")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(out, indent=2) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
