"""Heisenberg (HUR) and Schroedinger-Robertson (SR) bounds and saturation tests.

For observables X, Y and a state (pure vector or density matrix):

    HUR:  var(X) var(Y) >= |<[X, Y]>|^2 / 4
    SR:   var(X) var(Y) >= |<[X, Y]>|^2 / 4 + <{X~, Y~}>^2 / 4

with O~ = O - <O>.  For a bipartite pure state the bound is attained iff
every Schmidt vector |a_i> on the observables' side satisfies

    (X~ + Gamma Y~) |a_i> = 0,

Gamma purely imaginary for HUR and any complex number for SR.
``saturation_analysis`` checks that condition numerically.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, ZeroVariance
from .linalg import (
    BipartiteState,
    DensityMatrix,
    StateVector,
    anticommutator,
    as_matrix,
    assert_hermitian,
    commutator,
    expectation,
    partial_trace_b,
    raw_expectation,
    schmidt,
    variance,
)

DEFAULT_TOL = 1e-8
ZERO_VARIANCE = 1e-14
TRIVIAL_VARIANCE = 1e-10


class Mode(str, enum.Enum):
    HUR = "HUR"
    SR = "SR"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


class Verdict(str, enum.Enum):
    SATURABLE = "Saturable"
    NOT_SATURABLE = "NotSaturable"
    TRIVIALLY_SATURATED = "TriviallySaturated"


@dataclass(frozen=True)
class UncertaintyReport:
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    commutator_mean: complex  # <[X, Y]>, purely imaginary
    anticommutator_mean: float  # <{X~, Y~}>
    hur_rhs: float
    sr_rhs: float
    hur_gap: float
    sr_gap: float

    @property
    def product(self) -> float:
        return self.var_x * self.var_y

    def gap(self, mode) -> float:
        return self.hur_gap if Mode.parse(mode) is Mode.HUR else self.sr_gap

    def to_dict(self) -> dict:
        return {
            "meanX": self.mean_x,
            "meanY": self.mean_y,
            "varX": self.var_x,
            "varY": self.var_y,
            "hurRHS": self.hur_rhs,
            "srRHS": self.sr_rhs,
            "hurGap": self.hur_gap,
            "srGap": self.sr_gap,
        }


def _operator_pair(x, y, dim: int) -> tuple[np.ndarray, np.ndarray]:
    x = assert_hermitian(x, "X")
    y = assert_hermitian(y, "Y")
    if x.shape != y.shape or x.shape[0] != dim:
        raise DimensionMismatch(f"X {x.shape}, Y {y.shape} on a {dim}-dim state")
    return x, y


def evaluate(x, y, state) -> UncertaintyReport:
    """Both uncertainty relations for ``state`` (StateVector or DensityMatrix)."""
    x, y = _operator_pair(x, y, state.dim)
    mx, my = expectation(x, state), expectation(y, state)
    vx, vy = variance(x, state), variance(y, state)
    eye = np.eye(x.shape[0])
    comm = raw_expectation(commutator(x, y), state)
    anti = raw_expectation(anticommutator(x - mx * eye, y - my * eye), state).real
    hur = 0.25 * abs(comm) ** 2
    sr = hur + 0.25 * anti**2
    prod = vx * vy
    return UncertaintyReport(
        mean_x=mx,
        mean_y=my,
        var_x=vx,
        var_y=vy,
        commutator_mean=1j * comm.imag,
        anticommutator_mean=float(anti),
        hur_rhs=float(hur),
        sr_rhs=float(sr),
        hur_gap=float(prod - hur),
        sr_gap=float(prod - sr),
    )


# two-branch states  c1 |psi_1>|alpha_1> + c2 |psi_2>|alpha_2>


@dataclass(frozen=True)
class TwoBranchState:
    """Two branches on H_A tagged by orthonormal B states.

    The branch states need not be orthogonal to each other.  The weights are
    renormalised so that |c1|^2 + |c2|^2 = 1.
    """

    c1: complex
    c2: complex
    psi1: StateVector
    psi2: StateVector

    def __post_init__(self):
        if self.psi1.dim != self.psi2.dim:
            raise DimensionMismatch("branch states live in different spaces")
        n = np.sqrt(abs(self.c1) ** 2 + abs(self.c2) ** 2)
        if n == 0:
            raise ValueError("both branch weights vanish")
        object.__setattr__(self, "c1", complex(self.c1) / n)
        object.__setattr__(self, "c2", complex(self.c2) / n)

    @property
    def weights(self) -> tuple[float, float]:
        return abs(self.c1) ** 2, abs(self.c2) ** 2

    def to_bipartite(self) -> BipartiteState:
        d = np.stack([self.c1 * self.psi1.amplitudes, self.c2 * self.psi2.amplitudes], axis=1)
        return BipartiteState(self.psi1.dim, 2, d)


def _branch_moments(o, s: TwoBranchState):
    o = assert_hermitian(o)
    if o.shape[0] != s.psi1.dim:
        raise DimensionMismatch(f"operator {o.shape} on {s.psi1.dim}-dim branches")
    means = (expectation(o, s.psi1), expectation(o, s.psi2))
    variances = (variance(o, s.psi1), variance(o, s.psi2))
    return means, variances


def two_branch_variance(o, s: TwoBranchState) -> float:
    """sum_i |c_i|^2 var_i(O) + |c1|^2 |c2|^2 (<O>_1 - <O>_2)^2."""
    (m1, m2), (v1, v2) = _branch_moments(o, s)
    w1, w2 = s.weights
    return w1 * v1 + w2 * v2 + w1 * w2 * (m1 - m2) ** 2


def two_branch_product(x, y, s: TwoBranchState) -> float:
    """var(X) var(Y) in the two-branch state, expanded term by term.

    Algebraically identical to the product of two ``two_branch_variance``
    calls; the expansion exposes the conditions for the minimum.
    """
    (x1, x2), (vx1, vx2) = _branch_moments(x, s)
    (y1, y2), (vy1, vy2) = _branch_moments(y, s)
    w1, w2 = s.weights
    sx1, sx2, sy1, sy2 = np.sqrt([vx1, vx2, vy1, vy2])
    dx, dy = x1 - x2, y1 - y2
    w = w1 * w2
    return float(
        w1**2 * vx1 * vy1
        + w2**2 * vx2 * vy2
        + 2 * w * sx1 * sy1 * sx2 * sy2
        + w**2 * dy**2 * dx**2
        + w * (sx1 * sy2 - sx2 * sy1) ** 2
        + w * ((w1 * vx1 + w2 * vx2) * dy**2 + (w1 * vy1 + w2 * vy2) * dx**2)
    )


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    residual: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _check(name: str, residual: float, tol: float) -> ConditionCheck:
    return ConditionCheck(name, float(residual), bool(residual <= tol))


def necessary_conditions(x, y, s: TwoBranchState, tol: float = DEFAULT_TOL) -> list[ConditionCheck]:
    """The four necessary conditions for the two-branch product to be minimal.

    (i) equal X means, (ii) equal Y means, (iii) each branch is itself a
    HUR minimum-uncertainty state, (iv) dX_1 dY_2 = dX_2 dY_1.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    (x1, x2), (vx1, vx2) = _branch_moments(x, s)
    (y1, y2), (vy1, vy2) = _branch_moments(y, s)
    branch_gaps = [evaluate(x, y, psi).hur_gap for psi in (s.psi1, s.psi2)]
    sx1, sx2, sy1, sy2 = np.sqrt([vx1, vx2, vy1, vy2])
    return [
        _check("i", abs(x1 - x2), tol),
        _check("ii", abs(y1 - y2), tol),
        _check("iii", max(abs(g) for g in branch_gaps), tol),
        _check("iv", abs(sx1 * sy2 - sx2 * sy1), tol),
    ]


def annihilation_residual(x, y, gamma: complex, mean_x: float, mean_y: float, a) -> float:
    """|| (X - mean_x + gamma (Y - mean_y)) |a> ||."""
    x, y = as_matrix(x), as_matrix(y)
    v = np.asarray(getattr(a, "amplitudes", a), dtype=complex).reshape(-1)
    if x.shape != y.shape or x.shape[1] != v.size:
        raise DimensionMismatch(f"X {x.shape}, Y {y.shape}, vector {v.size}")
    r = x @ v - mean_x * v + gamma * (y @ v - mean_y * v)
    return float(np.linalg.norm(r))


def gamma_minimizer(x, y, state, mode=Mode.HUR) -> complex:
    """Gamma minimising tr rho (X~ + Gamma Y~)^dag (X~ + Gamma Y~).

    HUR restricts Gamma = i a with a real:  a = -<i[X,Y]> / (2 var Y).
    SR also frees the real part:  Re Gamma = -<{X~,Y~}> / (2 var Y).
    """
    mode = Mode.parse(mode)
    rep = evaluate(x, y, state)
    if rep.var_y < ZERO_VARIANCE:
        raise ZeroVariance(f"var(Y) = {rep.var_y:.3e}")
    i_comm = (1j * rep.commutator_mean).real
    gamma_i = -0.5 * i_comm / rep.var_y
    if mode is Mode.HUR:
        return complex(0.0, gamma_i)
    gamma_r = -0.5 * rep.anticommutator_mean / rep.var_y
    return complex(gamma_r, gamma_i)


@dataclass(frozen=True)
class SchmidtResidual:
    index: int
    coefficient: float
    annihilation: float
    mean_x_mismatch: float
    mean_y_mismatch: float
    variance_ratio_mismatch: float  # |var_i X - |Gamma|^2 var_i Y|

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "coefficient": self.coefficient,
            "annihilation": self.annihilation,
            "meanXMismatch": self.mean_x_mismatch,
            "meanYMismatch": self.mean_y_mismatch,
            "varianceRatioMismatch": self.variance_ratio_mismatch,
        }


@dataclass(frozen=True)
class SaturationReport:
    mode: Mode
    verdict: Verdict
    gamma: complex | None
    uncertainty: UncertaintyReport
    schmidt_coefficients: np.ndarray
    rank: int
    residuals: list[SchmidtResidual] = field(default_factory=list)
    off_diagonal_max_x: float = 0.0
    off_diagonal_max_y: float = 0.0
    swapped: bool = False  # True when var(Y) vanished and X, Y roles were exchanged
    tol: float = DEFAULT_TOL

    @property
    def max_annihilation(self) -> float:
        return max((r.annihilation for r in self.residuals), default=0.0)

    def to_dict(self) -> dict:
        d = self.uncertainty.to_dict()
        d.update(
            {
                "mode": self.mode.value,
                "verdict": self.verdict.value,
                "gamma": None if self.gamma is None else [self.gamma.real, self.gamma.imag],
                "rank": self.rank,
                "schmidtCoefficients": [float(c) for c in self.schmidt_coefficients],
                "residuals": [r.to_dict() for r in self.residuals],
                "offDiagonalMaxX": self.off_diagonal_max_x,
                "offDiagonalMaxY": self.off_diagonal_max_y,
                "swapped": self.swapped,
                "tol": self.tol,
            }
        )
        return d


def _off_diagonal_max(o: np.ndarray, vecs: np.ndarray) -> float:
    if len(vecs) < 2:
        return 0.0
    m = vecs.conj() @ o @ vecs.T
    np.fill_diagonal(m, 0.0)
    return float(np.max(np.abs(m)))


def saturation_analysis(
    x,
    y,
    psi: BipartiteState,
    mode=Mode.HUR,
    tol: float = DEFAULT_TOL,
    rank_tol: float | None = None,
) -> SaturationReport:
    """Decide whether ``psi`` attains the HUR or SR bound for X (x) 1, Y (x) 1.

    The verdict rests on the annihilation residuals of the Schmidt vectors
    under C = X~ + Gamma_min Y~, which vanish exactly when the bound is
    attained.  Per-vector mean mismatches, the variance-ratio mismatch and
    the off-diagonal elements of X, Y in the Schmidt subspace are reported
    as diagnostics; with a real SR Gamma they need not vanish.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mode = Mode.parse(mode)
    dec = schmidt(psi, rank_tol)
    rho = partial_trace_b(psi)
    x, y = _operator_pair(x, y, psi.dim_a)
    rep = evaluate(x, y, rho)
    vecs = dec.basis_a[: dec.rank]
    common = dict(
        mode=mode,
        uncertainty=rep,
        schmidt_coefficients=dec.coefficients,
        rank=dec.rank,
        off_diagonal_max_x=_off_diagonal_max(x, vecs),
        off_diagonal_max_y=_off_diagonal_max(y, vecs),
        tol=tol,
    )
    if rep.var_x < TRIVIAL_VARIANCE and rep.var_y < TRIVIAL_VARIANCE:
        return SaturationReport(verdict=Verdict.TRIVIALLY_SATURATED, gamma=None, **common)

    swapped = rep.var_y < ZERO_VARIANCE
    ox, oy = (y, x) if swapped else (x, y)
    mx, my = (rep.mean_y, rep.mean_x) if swapped else (rep.mean_x, rep.mean_y)
    gamma = gamma_minimizer(ox, oy, rho, mode)

    residuals = []
    for k, a in enumerate(vecs):
        sv = StateVector(a)
        residuals.append(
            SchmidtResidual(
                index=k,
                coefficient=float(dec.coefficients[k]),
                annihilation=annihilation_residual(ox, oy, gamma, mx, my, a),
                mean_x_mismatch=abs(expectation(x, sv) - rep.mean_x),
                mean_y_mismatch=abs(expectation(y, sv) - rep.mean_y),
                variance_ratio_mismatch=abs(variance(ox, sv) - abs(gamma) ** 2 * variance(oy, sv)),
            )
        )
    ok = all(r.annihilation <= tol for r in residuals)
    verdict = Verdict.SATURABLE if ok else Verdict.NOT_SATURABLE
    return SaturationReport(verdict=verdict, gamma=gamma, residuals=residuals, swapped=swapped, **common)
