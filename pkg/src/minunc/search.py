"""Derivative-free search for entangled states that minimise the HUR/SR gap.

The amplitude matrix is parametrised by 2 d_A d_B reals (or, with a rank
target s, as U V^T with U: d_A x s and V: d_B x s) and normalised on every
evaluation.  A quadratic penalty keeps the leading Schmidt coefficients
above a floor delta; its weight grows x10 per restart.  Each restart's
optimum is projected exactly onto the floor before its gap is recorded,
so reported states are always feasible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import NoProgress
from .linalg import (
    BipartiteState,
    DensityMatrix,
    as_matrix,
    assert_hermitian,
    commutator,
    schmidt,
)
from .uncertainty import Mode, evaluate

PENALTY_START = 100.0
# a restart whose raw optimum undershoots the floor by more than this is discarded
FEASIBILITY_SLACK = 1e-2


@dataclass(frozen=True)
class SearchProblem:
    dim_a: int
    dim_b: int
    x: np.ndarray
    y: np.ndarray
    mode: Mode = Mode.SR
    min_schmidt_coeff: float = 0.0
    seed: int = 0
    restarts: int = 4
    max_iters: int = 4000
    tolerance: float = 1e-6
    rank: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        x = assert_hermitian(self.x, "X")
        y = assert_hermitian(self.y, "Y")
        if x.shape != (self.dim_a, self.dim_a) or y.shape != x.shape:
            raise ValueError(f"observables must be {self.dim_a}x{self.dim_a}")
        if np.linalg.norm(commutator(x, y)) <= 1e-10:
            raise ValueError("X and Y commute; the search needs a noncommuting pair")
        s = self.schmidt_terms
        if not 1 <= s <= min(self.dim_a, self.dim_b):
            raise ValueError(f"rank {s} outside 1..{min(self.dim_a, self.dim_b)}")
        if not 0 <= self.min_schmidt_coeff < 1 / math.sqrt(s):
            raise ValueError(f"floor {self.min_schmidt_coeff} infeasible for {s} Schmidt terms")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def schmidt_terms(self) -> int:
        return self.rank if self.rank is not None else min(self.dim_a, self.dim_b)

    @property
    def n_params(self) -> int:
        if self.rank is None:
            return 2 * self.dim_a * self.dim_b
        return 2 * self.rank * (self.dim_a + self.dim_b)

    def amplitudes(self, theta: np.ndarray) -> np.ndarray:
        half = theta.size // 2
        z = theta[:half] + 1j * theta[half:]
        if self.rank is None:
            m = z.reshape(self.dim_a, self.dim_b)
        else:
            u = z[: self.dim_a * self.rank].reshape(self.dim_a, self.rank)
            v = z[self.dim_a * self.rank :].reshape(self.dim_b, self.rank)
            m = u @ v.T
        return m / np.linalg.norm(m)

    def to_dict(self) -> dict:
        from .serialize import matrix_to_json

        return {
            "dimA": self.dim_a,
            "dimB": self.dim_b,
            "x": matrix_to_json(self.x),
            "y": matrix_to_json(self.y),
            "mode": self.mode.value,
            "minSchmidtCoeff": self.min_schmidt_coeff,
            "seed": self.seed,
            "restarts": self.restarts,
            "maxIters": self.max_iters,
            "tolerance": self.tolerance,
            "rank": self.rank,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchProblem":
        from .serialize import matrix_from_json

        return cls(
            dim_a=int(d["dimA"]),
            dim_b=int(d["dimB"]),
            x=matrix_from_json(d["x"]),
            y=matrix_from_json(d["y"]),
            mode=d.get("mode", "SR"),
            min_schmidt_coeff=float(d.get("minSchmidtCoeff", 0.0)),
            seed=int(d.get("seed", 0)),
            restarts=int(d.get("restarts", 4)),
            max_iters=int(d.get("maxIters", 4000)),
            tolerance=float(d.get("tolerance", 1e-6)),
            rank=d.get("rank"),
        )


@dataclass(frozen=True)
class SearchResult:
    best_gap: float
    best_state: BipartiteState
    schmidt_profile: np.ndarray
    iterations: int
    converged: bool
    best_by_restart: list[float] = field(default_factory=list)  # running minimum
    feasible_restarts: int = 0
    witness: bool = False  # best_gap below the problem tolerance

    def to_dict(self) -> dict:
        from .serialize import bipartite_to_json

        return {
            "bestGap": self.best_gap,
            "bestState": bipartite_to_json(self.best_state),
            "schmidtProfile": [float(c) for c in self.schmidt_profile],
            "iterations": self.iterations,
            "converged": self.converged,
            "bestByRestart": self.best_by_restart,
            "feasibleRestarts": self.feasible_restarts,
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def enforce_floor(m: np.ndarray, floor: float, terms: int) -> np.ndarray:
    """Keep the Schmidt vectors of ``m`` and reshape its coefficients so the
    first ``terms`` are all >= floor, the rest are zero and the norm is 1.

    Coefficients below the floor are pinned to it and the others are scaled
    down to absorb the difference.
    """
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    c = np.zeros_like(s)
    c[:terms] = s[:terms]
    c /= np.linalg.norm(c)
    if floor > 0:
        pinned = np.zeros(terms, dtype=bool)
        for _ in range(terms):
            pinned |= c[:terms] < floor
            free = ~pinned
            budget = 1.0 - floor**2 * pinned.sum()
            c[:terms][pinned] = floor
            norm_free = np.linalg.norm(c[:terms][free])
            if norm_free > 0:
                c[:terms][free] *= math.sqrt(budget) / norm_free
            if np.all(c[:terms] >= floor - 1e-15):
                break
        c[:terms] = np.maximum(c[:terms], floor)
    return (u * c) @ vh


def _reduced(m: np.ndarray) -> DensityMatrix:
    rho = m @ m.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T) / np.trace(rho).real)


def state_gap(p: SearchProblem, m: np.ndarray) -> float:
    return evaluate(p.x, p.y, _reduced(m)).gap(p.mode)


def _fast_gap(x: np.ndarray, y: np.ndarray, m: np.ndarray, mode: Mode) -> float:
    # objective only; unvalidated traces of rho = m m^dag
    rho = m @ m.conj().T
    rho /= np.trace(rho).real
    mx = np.trace(rho @ x).real
    my = np.trace(rho @ y).real
    eye = np.eye(x.shape[0])
    xt, yt = x - mx * eye, y - my * eye
    rx, ry = rho @ xt, rho @ yt
    vx = np.trace(rx @ xt).real
    vy = np.trace(ry @ yt).real
    xy = np.trace(rx @ yt)
    gap = vx * vy - xy.imag**2
    if mode is Mode.SR:
        gap -= xy.real**2
    return float(gap)


def minimize_gap(p: SearchProblem) -> SearchResult:
    """Multi-restart Nelder-Mead over the (rank-limited) state manifold."""
    rng = np.random.default_rng(p.seed)
    terms = p.schmidt_terms
    floor = p.min_schmidt_coeff

    def objective(theta, weight):
        m = p.amplitudes(theta)
        s = np.linalg.svd(m, compute_uv=False)[:terms]
        penalty = weight * float(np.sum(np.clip(floor - s, 0.0, None) ** 2))
        return _fast_gap(p.x, p.y, m, p.mode) + penalty

    best_gap, best_m = math.inf, None
    history, iterations, feasible, converged = [], 0, 0, False
    weight = PENALTY_START
    for _ in range(p.restarts):
        theta0 = rng.normal(size=p.n_params)
        res = minimize(
            objective,
            theta0,
            args=(weight,),
            method="Nelder-Mead",
            options={"maxiter": p.max_iters, "maxfev": 2 * p.max_iters, "xatol": 1e-10, "fatol": 1e-15, "adaptive": True},
        )
        iterations += int(res.nit)
        weight *= 10
        m = p.amplitudes(res.x)
        s = np.linalg.svd(m, compute_uv=False)[:terms]
        if floor - s.min() > FEASIBILITY_SLACK:
            history.append(best_gap)
            continue
        feasible += 1
        converged = converged or bool(res.success)
        m = enforce_floor(m, floor, terms)
        gap = state_gap(p, m)
        if gap < best_gap:
            best_gap, best_m = gap, m
        history.append(best_gap)

    if best_m is None:
        raise NoProgress(f"all {p.restarts} restarts violated the Schmidt floor {floor}")
    state = BipartiteState(p.dim_a, p.dim_b, best_m)
    return SearchResult(
        best_gap=float(best_gap),
        best_state=state,
        schmidt_profile=schmidt(state).coefficients,
        iterations=iterations,
        converged=converged,
        best_by_restart=[float(g) for g in history],
        feasible_restarts=feasible,
        witness=bool(best_gap < p.tolerance),
    )


def saturation_hunt(p: SearchProblem) -> SearchResult:
    """Search restricted to Schmidt rank ``p.rank`` < d_A for a saturating state.

    With full Schmidt rank no noncommuting pair can be saturated by an
    entangled state; below full rank, operators that are diagonal on the
    Schmidt subspace can be.  ``result.witness`` reports success.
    """
    if p.rank is None or p.rank >= p.dim_a:
        raise ValueError("saturation_hunt needs a rank target below dim_a")
    return minimize_gap(p)


def block_witness_observables() -> tuple[np.ndarray, np.ndarray]:
    """X = sigma_x (+) 0, Y = sigma_y (+) 0 on C^3.

    Noncommuting, yet c1 |0>|b1> + c2 |2>|b2> saturates both relations
    for any c1, c2: X and Y are diagonal (zero) on span{|0>, |2>}.
    """
    x = np.zeros((3, 3), dtype=complex)
    y = np.zeros((3, 3), dtype=complex)
    x[:2, :2] = [[0, 1], [1, 0]]
    y[:2, :2] = [[0, -1j], [1j, 0]]
    return x, y


def verify_result(p: SearchProblem, r: SearchResult) -> float:
    """|reported gap - gap recomputed from the full pure state|."""
    eye = np.eye(p.dim_b)
    rep = evaluate(np.kron(as_matrix(p.x), eye), np.kron(as_matrix(p.y), eye), r.best_state.vector)
    return abs(rep.gap(p.mode) - r.best_gap)
