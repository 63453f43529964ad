"""Claim suites run by ``minunc verify``.

Each suite returns a list of :class:`Claim`; the CLI exits 0 only when all
claims pass.  Sizes are modest so every suite finishes in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    SIGMA_X,
    SIGMA_Y,
    DensityMatrix,
    partial_trace_b,
    random_bipartite,
    random_hermitian,
    schmidt,
)
from .mixedstate import (
    d_curve,
    entropy_of_beta,
    entropy_to_beta,
    equivalence_check,
    phi_of_mu,
    purity_bounds,
    saturator,
)
from .models import (
    EPRGaussian,
    FockSystem,
    GaussianPacket,
    Grid1D,
    SpinSystem,
    converged_in_cutoff,
    epr_moments,
    epr_schmidt_rank,
    gibbs_beta_for_purity,
    spin_no_saturation_check,
)
from .oracles import qubit_gap_scan
from .search import SearchProblem, block_witness_observables, minimize_gap, saturation_hunt
from .uncertainty import (
    TwoBranchState,
    Verdict,
    evaluate,
    necessary_conditions,
    saturation_analysis,
    two_branch_product,
    two_branch_variance,
)


@dataclass
class Claim:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "details": self.details}


@dataclass(frozen=True)
class SuiteConfig:
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    tol: float = 1e-8
    seed: int = 0
    grid_points: int = 512
    fock_cutoff: int = 60


def spin_suite(cfg: SuiteConfig) -> list[Claim]:
    claims = []
    for j2 in (1, 2, 3):
        sys = SpinSystem(j2)
        j = sys.j
        top, bottom = sys.state(j), sys.state(-j)
        worst_product, min_gap = 0.0, math.inf
        for w in np.arange(1, 10) / 10:
            s = TwoBranchState(math.sqrt(w), math.sqrt(1 - w), top, bottom)
            prod = two_branch_product(sys.jx, sys.jy, s)
            rep = evaluate(sys.jx, sys.jy, partial_trace_b(s.to_bipartite()))
            worst_product = max(worst_product, abs(prod - j * j / 4), abs(rep.product - j * j / 4))
            min_gap = min(min_gap, rep.hur_gap)
        claims.append(Claim(f"j={j}: entangled product equals j^2/4", worst_product < 1e-10, {"max_error": worst_product}))
        claims.append(Claim(f"j={j}: strict HUR gap for |c1|^2 in 0.1..0.9", min_gap > 1e-6, {"min_gap": min_gap}))
        edge = evaluate(sys.jx, sys.jy, top)
        claims.append(Claim(f"j={j}: product state |j,j> saturates", abs(edge.hur_gap) < 1e-12, {"gap": edge.hur_gap}))
        chk = spin_no_saturation_check(sys)
        ok = (
            chk.residual_top < 1e-12
            and chk.residual_bottom < 1e-12
            and chk.ladder_error < 1e-12
            and chk.min_max_residual >= chk.min_max_closed - 1e-9
            and not chk.jointly_solvable
        )
        claims.append(Claim(f"j={j}: no single Gamma annihilates both |j,+-j>", ok, chk.to_dict()))
    return claims


def oscillator_suite(cfg: SuiteConfig) -> list[Claim]:
    fock = FockSystem(cfg.fock_cutoff, cfg.mass, cfg.omega, cfg.hbar)
    q, p = fock.x, fock.p
    half = (cfg.hbar / 2) ** 2
    claims = []
    s = TwoBranchState(1, 1, fock.number_state(0), fock.number_state(2))
    direct = evaluate(np.kron(q, np.eye(2)), np.kron(p, np.eye(2)), s.to_bipartite().vector)
    closed = two_branch_product(q, p, s)
    expected = half * (0.5 * 1 + 0.5 * 5) ** 2
    claims.append(
        Claim(
            "(n1,n2)=(0,2): product = (hbar^2/4)(sum |c|^2 (2n+1))^2",
            abs(direct.product - expected) < 1e-8 and abs(closed - expected) < 1e-8,
            {"direct": direct.product, "closed": closed, "expected": expected, "unsquared_sum": half * 3},
        )
    )
    claims.append(Claim("(0,2): strictly above hbar^2/4", direct.product > half + 1e-6, {"gap": direct.hur_gap}))

    def branch_product(f):
        b = TwoBranchState(1, 1, f.number_state(0), f.number_state(2))
        return two_branch_product(f.x, f.p, b)

    stable = converged_in_cutoff(branch_product, fock)
    claims.append(Claim("(0,2): unchanged when the cutoff doubles", abs(stable - expected) < 1e-8, {"value": stable}))
    conds = necessary_conditions(q, p, s, cfg.tol)
    claims.append(
        Claim(
            "(0,2): conditions i, ii, iv hold; iii fails for |2>",
            conds[0].passed and conds[1].passed and conds[3].passed and not conds[2].passed,
            {c.name: c.residual for c in conds},
        )
    )
    s00 = TwoBranchState(1, 1, fock.number_state(0), fock.number_state(0))
    rep00 = evaluate(np.kron(q, np.eye(2)), np.kron(p, np.eye(2)), s00.to_bipartite().vector)
    rank00 = schmidt(s00.to_bipartite()).rank
    claims.append(
        Claim("(0,0): reaches hbar^2/4 but is a product state", abs(rep00.product - half) < 1e-10 and rank00 == 1, {"rank": rank00})
    )

    grid = Grid1D(extent=12.0, points=cfg.grid_points, hbar=cfg.hbar)
    xg, pg = grid.position_matrix(), grid.momentum_matrix()
    g = GaussianPacket(0.0, 0.0, 1.0, cfg.hbar).on_grid(grid)
    same = necessary_conditions(xg, pg, TwoBranchState(1, 1, g, g), 1e-8)
    claims.append(Claim("identical Gaussian branches pass i-iv", all(c.passed for c in same), {c.name: c.residual for c in same}))
    g1 = GaussianPacket(1.0, 0.0, 1.0, cfg.hbar).on_grid(grid)
    g2 = GaussianPacket(-1.0, 0.0, 1.0, cfg.hbar).on_grid(grid)
    split = TwoBranchState(1, 1, g1, g2)
    conds = necessary_conditions(xg, pg, split, 1e-8)
    var = two_branch_variance(xg, split)
    claims.append(
        Claim("displaced Gaussian branches fail (i); var X = sigma^2 + 1", (not conds[0].passed) and abs(var - 2.0) < 1e-8, {"varX": var})
    )
    return claims


def epr_suite(cfg: SuiteConfig) -> list[Claim]:
    claims = []
    locus = EPRGaussian(1.0, 0.25, cfg.hbar, cfg.grid_points)
    m = epr_moments(locus)
    claims.append(Claim("closed-form product = hbar/2 at Omega = 1/(4 sigma)", abs(m.product - cfg.hbar / 2) < 1e-12, {"product": m.product}))
    rel = abs(m.product_grid - m.product) / m.product
    claims.append(Claim("grid product matches closed form (1e-4 rel)", rel < 1e-4, {"rel_error": rel}))
    off = EPRGaussian(1.0, 1.0, cfg.hbar, cfg.grid_points)
    mo = epr_moments(off)
    rel_off = abs(mo.product_grid - mo.product) / mo.product
    claims.append(
        Claim("(1, 1): product 1.0625 hbar, grid agrees", abs(mo.product - 1.0625 * cfg.hbar) < 1e-12 and rel_off < 1e-4, {"rel_error": rel_off})
    )
    r_locus, _ = epr_schmidt_rank(locus)
    r_off, _ = epr_schmidt_rank(off)
    claims.append(Claim("Schmidt rank 1 on the locus, >= 2 off it", r_locus == 1 and r_off >= 2, {"rank_locus": r_locus, "rank_off": r_off}))
    sig = np.linspace(0.5, 2.0, 7)
    ok = True
    for s in sig:
        omegas = np.linspace(0.05, 1.0, 400)
        prods = [EPRGaussian(s, o, cfg.hbar).closed_form().product for o in omegas]
        best = omegas[int(np.argmin(prods))]
        ok &= abs(best - 1 / (4 * s)) <= omegas[1] - omegas[0]
    claims.append(Claim("minimum over Omega sits at 1/(4 sigma)", bool(ok)))
    return claims


def rank_suite(cfg: SuiteConfig) -> list[Claim]:
    rng = np.random.default_rng(cfg.seed)
    spin1 = SpinSystem(2)
    saturable = 0
    min_residual = math.inf
    count = 0
    for dim, pairs in ((2, [(SIGMA_X, SIGMA_Y)]), (3, [(spin1.jx, spin1.jy)])):
        for _ in range(50):
            psi = _full_rank_state(dim, 0.2, rng)
            ops = pairs + [_noncommuting_pair(dim, rng)]
            for x, y in ops:
                for mode in ("HUR", "SR"):
                    rep = saturation_analysis(x, y, psi, mode, cfg.tol)
                    count += 1
                    saturable += rep.verdict is Verdict.SATURABLE
                    min_residual = min(min_residual, rep.max_annihilation)
    claims = [
        Claim(
            "maximal Schmidt rank never saturates",
            saturable == 0 and min_residual > 1e-3,
            {"analyses": count, "saturable": saturable, "min_max_residual": min_residual},
        )
    ]
    scan = qubit_gap_scan(SIGMA_X, SIGMA_Y, 0.3, "SR", 41, 41, 81)
    res = minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", 0.3, seed=cfg.seed))
    claims.append(Claim("qubit search with delta=0.3 stays above G0", res.best_gap >= scan.g0, {"best_gap": res.best_gap, "g0": scan.g0}))
    x, y = block_witness_observables()
    hunt = saturation_hunt(SearchProblem(3, 3, x, y, "HUR", 0.3, seed=cfg.seed, rank=2))
    claims.append(
        Claim(
            "rank-2 witness below full rank (d_A = 3)",
            hunt.witness and hunt.schmidt_profile[1] >= 0.3 - 1e-12,
            {"best_gap": hunt.best_gap, "schmidt": [float(c) for c in hunt.schmidt_profile]},
        )
    )
    return claims


def _full_rank_state(dim: int, floor: float, rng):
    while True:
        psi = random_bipartite(dim, dim, rng)
        if schmidt(psi).coefficients.min() >= floor:
            return psi


def _noncommuting_pair(dim: int, rng):
    while True:
        x, y = random_hermitian(dim, rng), random_hermitian(dim, rng)
        if np.linalg.norm(x @ y - y @ x) > 1e-3:
            return x, y


def mixed_suite(cfg: SuiteConfig) -> list[Claim]:
    claims = []
    fock = FockSystem(cfg.fock_cutoff, cfg.mass, cfg.omega, cfg.hbar)
    worst_dm, worst_ent = math.inf, math.inf
    for mu in np.linspace(0.3, 0.99, 24):
        rho = fock.gibbs(gibbs_beta_for_purity(mu))
        rep = purity_bounds(rho, fock.x, fock.p, cfg.hbar)
        worst_dm = min(worst_dm, rep.dm_lhs - rep.dm_rhs)
        worst_ent = min(worst_ent, rep.dm_lhs - rep.entropic_rhs)
    claims.append(Claim("purity bound holds on Gibbs family", worst_dm >= -1e-6, {"min_margin": worst_dm}))
    claims.append(Claim("entropic bound holds (tight) on Gibbs family", worst_ent >= -1e-6, {"min_margin": worst_ent}))
    worst = 0.0
    for s in np.geomspace(1e-6, 10, 60):
        worst = max(worst, abs(entropy_of_beta(entropy_to_beta(s)) - s))
    claims.append(Claim("entropy <-> beta round trip", worst < 1e-10, {"max_residual": worst}))
    claims.append(Claim("Phi(1) = 1", phi_of_mu(1.0) == 1.0))
    ground = DensityMatrix.from_state(fock.number_state(0))
    c = saturator(fock.x, fock.p, ground, "SR")
    claims.append(Claim("ground state: tr rho C^dag C = 0", abs(c.expectation_ctc()) < 1e-10, {"gamma": [c.gamma.real, c.gamma.imag]}))

    rng = np.random.default_rng(cfg.seed)
    worst_eq, worst_c = 0.0, 0.0
    for _ in range(50):
        psi = random_bipartite(3, 3, rng)
        x, y = random_hermitian(3, rng), random_hermitian(3, rng)
        worst_eq = max(worst_eq, equivalence_check(psi, x, y).max_abs_diff)
        rho = DensityMatrix(psi.amplitudes @ psi.amplitudes.conj().T)
        for kind in ("HUR", "SR"):
            curve = d_curve(x, y, rho, kind)
            worst_c = max(worst_c, abs(saturator(x, y, rho, kind).expectation_ctc() - curve.minimizer_value))
    claims.append(Claim("pure-entangled and reduced-state reports agree", worst_eq < 1e-10, {"max_diff": worst_eq}))
    claims.append(Claim("tr rho C^dag C equals D_min", worst_c < 1e-10, {"max_diff": worst_c}))
    return claims


SUITES = {
    "spin": spin_suite,
    "oscillator": oscillator_suite,
    "epr": epr_suite,
    "rank": rank_suite,
    "mixed": mixed_suite,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> list[Claim]:
    return SUITES[name](cfg or SuiteConfig())
