"""Mixed-state form of the saturation problem and the purity/entropy bounds.

For a density matrix rho the quantity

    D(Gamma) = tr rho (X~ + Gamma Y~)^dag (X~ + Gamma Y~) >= 0

is a quadratic in Gamma (Gamma = i a for HUR, any complex number for SR).
Its minimum is the HUR/SR gap divided by var Y, and it is attained by the
operator C = X~ + Gamma_min Y~.  The bound is saturated iff C annihilates
every eigenvector of rho with non-zero weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, EigenFailure, NoConvergence, ZeroVariance
from .linalg import (
    BipartiteState,
    DensityMatrix,
    StateVector,
    as_matrix,
    partial_trace_b,
    purity,
    tensor,
    von_neumann_entropy,
)
from .uncertainty import (
    ZERO_VARIANCE,
    Mode,
    UncertaintyReport,
    evaluate,
    gamma_minimizer,
)

# stands for beta = +infinity (pure state, S = 0)
BETA_PURE = math.inf


@dataclass(frozen=True)
class VariationalCurve:
    kind: Mode
    var_x: float
    var_y: float
    i_commutator: float  # <i[X, Y]>, real
    anticommutator: float  # <{X~, Y~}>
    minimizer_point: complex  # i a_min (HUR) or Gamma_min (SR)
    minimizer_value: float

    def __call__(self, gamma) -> np.ndarray:
        """D at ``gamma``; for HUR a real argument is read as a, Gamma = i a."""
        g = np.asarray(gamma)
        if self.kind is Mode.HUR and not np.iscomplexobj(g):
            g = 1j * g
        gr, gi = np.real(g), np.imag(g)
        d = self.var_x + (gr**2 + gi**2) * self.var_y + gi * self.i_commutator
        if self.kind is Mode.SR:
            d = d + gr * self.anticommutator
        return d

    @property
    def a_min(self) -> float:
        return self.minimizer_point.imag

    def evaluator(self) -> Callable:
        return self.__call__


def d_curve(x, y, rho, kind=Mode.HUR) -> VariationalCurve:
    """Closed-form D_hur(a) or D_sr(Gamma) for (X, Y, rho)."""
    kind = Mode.parse(kind)
    rep = evaluate(x, y, rho)
    if rep.var_y < ZERO_VARIANCE:
        raise ZeroVariance(f"var(Y) = {rep.var_y:.3e}")
    k = (1j * rep.commutator_mean).real
    s = rep.anticommutator_mean if kind is Mode.SR else 0.0
    gamma = complex(-0.5 * s / rep.var_y, -0.5 * k / rep.var_y)
    dmin = rep.var_x - 0.25 * (k**2 + s**2) / rep.var_y
    return VariationalCurve(
        kind=kind,
        var_x=rep.var_x,
        var_y=rep.var_y,
        i_commutator=k,
        anticommutator=rep.anticommutator_mean,
        minimizer_point=gamma,
        minimizer_value=float(dmin),
    )


@dataclass(frozen=True)
class SaturatorOperator:
    """C = X~ + Gamma_min Y~ built for a particular source state."""

    matrix: np.ndarray
    kind: Mode
    gamma: complex
    source: DensityMatrix

    def expectation_ctc(self, rho: DensityMatrix | None = None) -> float:
        rho = rho or self.source
        c = self.matrix
        return float(np.trace(rho.matrix @ c.conj().T @ c).real)


def saturator(x, y, rho, kind=Mode.HUR) -> SaturatorOperator:
    if isinstance(rho, StateVector):
        rho = DensityMatrix.from_state(rho)
    kind = Mode.parse(kind)
    gamma = gamma_minimizer(x, y, rho, kind)
    rep = evaluate(x, y, rho)
    eye = np.eye(rho.dim)
    c = (as_matrix(x) - rep.mean_x * eye) + gamma * (as_matrix(y) - rep.mean_y * eye)
    return SaturatorOperator(matrix=c, kind=kind, gamma=gamma, source=rho)


@dataclass(frozen=True)
class MinimumStateResult:
    saturates: bool
    weights: np.ndarray
    residuals: np.ndarray  # ||C |a_i>|| for the eigenvectors with weight > tol
    trace_ctc: float


def minimum_state_condition(c: SaturatorOperator, rho: DensityMatrix, tol: float = 1e-8) -> MinimumStateResult:
    """tr rho C^dag C = 0, checked eigenvector by eigenvector."""
    try:
        w, v = rho.eigh()
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh failures are rare
        raise EigenFailure(str(exc)) from exc
    keep = w > tol
    res = np.linalg.norm(c.matrix @ v[:, keep], axis=0)
    return MinimumStateResult(
        saturates=bool(np.all(res < tol)),
        weights=w[keep],
        residuals=res,
        trace_ctc=c.expectation_ctc(rho),
    )


# --------------------------------------------------------------------------
# purity and entropy bounds for (P, Q)


def _check_mu(mu: float) -> float:
    if not (0 < mu <= 1):
        raise DomainError(f"purity must lie in (0, 1], got {mu}")
    return float(mu)


def phi_of_mu(mu: float) -> float:
    """Approximate purity factor (4 + sqrt(16 + 9 mu^2)) / (9 mu), good to ~1%."""
    mu = _check_mu(mu)
    return (4 + math.sqrt(16 + 9 * mu * mu)) / (9 * mu)


def bastiaans_rhs(mu: float, hbar: float = 1.0) -> float:
    """Lower bound on dP dQ: (hbar/2) 8/(9 mu)."""
    mu = _check_mu(mu)
    return 0.5 * hbar * 8 / (9 * mu)


def entropy_of_beta(beta: float) -> float:
    """S(beta) = beta/(e^beta - 1) - ln(1 - e^-beta); S(inf) = 0."""
    if beta == BETA_PURE:
        return 0.0
    if beta <= 0:
        raise DomainError("beta must be positive")
    return beta / math.expm1(beta) - math.log(-math.expm1(-beta))


def entropy_to_beta(entropy: float, lo: float = 1e-8, hi: float = 100.0) -> float:
    """Invert S(beta) by bracketed root finding; S = 0 maps to BETA_PURE.

    S(beta) is strictly decreasing, so the bracket is widened until it
    straddles the target and then refined.
    """
    if entropy < 0:
        raise DomainError("entropy must be non-negative")
    if entropy == 0:
        return BETA_PURE
    for _ in range(60):
        if entropy_of_beta(lo) > entropy:
            break
        lo *= 1e-2
    else:
        raise NoConvergence(f"no lower bracket for S = {entropy}")
    for _ in range(60):
        if entropy_of_beta(hi) < entropy:
            break
        hi *= 2
    else:
        raise NoConvergence(f"no upper bracket for S = {entropy}")
    beta = brentq(lambda b: entropy_of_beta(b) - entropy, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    if abs(entropy_of_beta(beta) - entropy) > 1e-10:
        raise NoConvergence(f"residual {entropy_of_beta(beta) - entropy:.2e} at beta = {beta}")
    return beta


def entropic_rhs_from_beta(beta: float, hbar: float = 1.0) -> float:
    if beta == BETA_PURE:
        return 0.25 * hbar**2
    return 0.25 * hbar**2 * (1 + 2 / math.expm1(beta)) ** 2


def entropic_rhs(entropy: float, hbar: float = 1.0) -> float:
    """(hbar^2/4)(1 + 2/(e^beta - 1))^2 with beta from the entropy."""
    return entropic_rhs_from_beta(entropy_to_beta(entropy), hbar)


@dataclass(frozen=True)
class PurityBoundReport:
    mu: float
    bastiaans_rhs: float
    dp_dq: float
    phi: float
    dm_lhs: float
    dm_rhs: float
    entropy: float
    beta: float
    entropic_rhs: float
    tol: float = 1e-8

    @property
    def dm_satisfied(self) -> bool:
        return self.dm_lhs >= self.dm_rhs - self.tol

    @property
    def entropic_satisfied(self) -> bool:
        return self.dm_lhs >= self.entropic_rhs - self.tol

    @property
    def bastiaans_satisfied(self) -> bool:
        return self.dp_dq >= self.bastiaans_rhs - self.tol

    @property
    def satisfied(self) -> bool:
        return self.dm_satisfied and self.entropic_satisfied

    ROW_FIELDS = ("mu", "phi", "dmLHS", "dmRHS", "S", "beta", "entropicRHS", "satisfied")

    def to_row(self) -> dict:
        return {
            "mu": self.mu,
            "phi": self.phi,
            "dmLHS": self.dm_lhs,
            "dmRHS": self.dm_rhs,
            "S": self.entropy,
            "beta": self.beta,
            "entropicRHS": self.entropic_rhs,
            "satisfied": self.satisfied,
        }

    def to_dict(self) -> dict:
        d = self.to_row()
        d.update(
            {
                "beta": None if self.beta == BETA_PURE else self.beta,
                "betaInfinite": self.beta == BETA_PURE,
                "bastiaansRHS": self.bastiaans_rhs,
                "dPdQ": self.dp_dq,
                "dmSatisfied": self.dm_satisfied,
                "entropicSatisfied": self.entropic_satisfied,
                "bastiaansSatisfied": self.bastiaans_satisfied,
                "dmMargin": self.dm_lhs - self.dm_rhs,
                "entropicMargin": self.dm_lhs - self.entropic_rhs,
            }
        )
        return d


def purity_bounds(rho: DensityMatrix, q, p, hbar: float = 1.0, tol: float = 1e-8) -> PurityBoundReport:
    """Evaluate the purity- and entropy-based (P, Q) bounds for ``rho``.

    The left side is var P var Q - <{P~, Q~}>^2 / 4.  Entropies below
    1e-13 are treated as zero (pure state, beta infinite).
    """
    rep = evaluate(p, q, rho)
    mu = min(purity(rho), 1.0)
    s = von_neumann_entropy(rho)
    if s < 1e-13:
        s = 0.0
    beta = entropy_to_beta(s)
    phi = phi_of_mu(mu)
    return PurityBoundReport(
        mu=mu,
        bastiaans_rhs=bastiaans_rhs(mu, hbar),
        dp_dq=math.sqrt(rep.var_x * rep.var_y),
        phi=phi,
        dm_lhs=rep.product - 0.25 * rep.anticommutator_mean**2,
        dm_rhs=0.25 * hbar**2 * phi**2,
        entropy=s,
        beta=beta,
        entropic_rhs=entropic_rhs_from_beta(beta, hbar),
        tol=tol,
    )


# --------------------------------------------------------------------------
# entangled pure state vs reduced density matrix


@dataclass(frozen=True)
class EquivalenceReport:
    pure: UncertaintyReport
    reduced: UncertaintyReport
    max_abs_diff: float
    tol: float

    @property
    def agree(self) -> bool:
        return self.max_abs_diff <= self.tol


def equivalence_check(psi: BipartiteState, x, y, tol: float = 1e-10) -> EquivalenceReport:
    """Compare reports for X (x) 1, Y (x) 1 on Psi with X, Y on rho^A."""
    eye_b = np.eye(psi.dim_b)
    pure = evaluate(tensor(x, eye_b), tensor(y, eye_b), psi.vector)
    reduced = evaluate(x, y, partial_trace_b(psi))
    a, b = pure.to_dict(), reduced.to_dict()
    diff = max(abs(a[k] - b[k]) for k in a)
    return EquivalenceReport(pure=pure, reduced=reduced, max_abs_diff=float(diff), tol=tol)
