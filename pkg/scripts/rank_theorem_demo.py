"""Full Schmidt rank versus rank below d_A.

Random full-rank entangled states never saturate; the block observables in
d_A = 3 are saturated by a rank-2 state the optimiser finds on its own.
"""

import numpy as np

from minunc.linalg import SIGMA_X, SIGMA_Y, random_bipartite, schmidt
from minunc.search import SearchProblem, block_witness_observables, minimize_gap, saturation_hunt
from minunc.uncertainty import Verdict, saturation_analysis


def main():
    rng = np.random.default_rng(7)
    verdicts = []
    for _ in range(200):
        psi = random_bipartite(2, 2, rng)
        if schmidt(psi).coefficients.min() < 0.2:
            continue
        verdicts.append(saturation_analysis(SIGMA_X, SIGMA_Y, psi, "SR").verdict)
    n_sat = sum(v is Verdict.SATURABLE for v in verdicts)
    print(f"full-rank qubit states analysed: {len(verdicts)}, saturable: {n_sat}")

    r = minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", 0.3))
    print(f"qubits, delta = 0.3: best SR gap {r.best_gap:.6f} (analytic 4 d^2 (1 - d^2) = {4 * 0.09 * 0.91:.6f})")

    x, y = block_witness_observables()
    h = saturation_hunt(SearchProblem(3, 3, x, y, "HUR", 0.3, rank=2, seed=2))
    print(f"d_A = 3, rank 2: best HUR gap {h.best_gap:.2e}, witness {h.witness}, Schmidt {np.round(h.schmidt_profile, 4)}")


if __name__ == "__main__":
    main()
