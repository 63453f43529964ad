"""Concrete systems: spin-j, truncated oscillator, Gaussian packets, EPR-like state.

Spin operators are in units of hbar (hbar = 1).  The oscillator and the
grid models take hbar, mass and frequency explicitly, all defaulting to 1.
Half-integer spins are specified by ``j2 = 2j`` so that no float j is ever
stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, GridTooCoarse, InvalidM, NoConvergence
from .linalg import (
    BipartiteState,
    DensityMatrix,
    StateVector,
    basis,
    schmidt,
    variance,
)
from .uncertainty import annihilation_residual

# --------------------------------------------------------------------------
# spin j


def _twice(m) -> int:
    m2 = round(2 * float(m))
    if abs(2 * float(m) - m2) > 1e-12:
        raise InvalidM(f"m = {m} is not a multiple of 1/2")
    return m2


@dataclass(frozen=True)
class SpinSystem:
    """Angular momentum j = j2/2.  Basis order is m = j, j-1, ..., -j."""

    j2: int

    def __post_init__(self):
        if self.j2 < 1:
            raise ValueError("j must be at least 1/2")

    @property
    def j(self) -> float:
        return self.j2 / 2

    @property
    def dim(self) -> int:
        return self.j2 + 1

    @property
    def m_values(self) -> np.ndarray:
        return self.j - np.arange(self.dim)

    def index(self, m) -> int:
        m2 = _twice(m)
        if abs(m2) > self.j2 or (self.j2 - m2) % 2:
            raise InvalidM(f"m = {m} not allowed for j = {self.j}")
        return (self.j2 - m2) // 2

    def state(self, m) -> StateVector:
        return StateVector(basis(self.dim, self.index(m)))

    @cached_property
    def jz(self) -> np.ndarray:
        return np.diag(self.m_values).astype(complex)

    @cached_property
    def jplus(self) -> np.ndarray:
        # J+ |j,m> = sqrt((j-m)(j+m+1)) |j,m+1>; |j,m+1> sits one index up
        j, m = self.j, self.m_values
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k in range(1, self.dim):
            out[k - 1, k] = math.sqrt((j - m[k]) * (j + m[k] + 1))
        return out

    @cached_property
    def jminus(self) -> np.ndarray:
        return self.jplus.conj().T

    @cached_property
    def jx(self) -> np.ndarray:
        return 0.5 * (self.jplus + self.jminus)

    @cached_property
    def jy(self) -> np.ndarray:
        return -0.5j * (self.jplus - self.jminus)

    def operator(self, name: str) -> np.ndarray:
        return {"Jx": self.jx, "Jy": self.jy, "Jz": self.jz, "Jplus": self.jplus, "Jminus": self.jminus}[name]


def spin_variances(sys: SpinSystem, m) -> tuple[float, float]:
    """(var Jx, var Jy) in |j, m>, both (j(j+1) - m^2)/2.

    The closed form is checked against the matrix variances before return.
    """
    psi = sys.state(m)
    mf = _twice(m) / 2
    closed = 0.5 * (sys.j * (sys.j + 1) - mf**2)
    vx, vy = variance(sys.jx, psi), variance(sys.jy, psi)
    if abs(vx - closed) > 1e-10 or abs(vy - closed) > 1e-10:
        raise AssertionError(f"spin variance mismatch: closed {closed}, matrix ({vx}, {vy})")
    return closed, closed


@dataclass(frozen=True)
class SpinNoSaturation:
    j: float
    residual_top: float  # Gamma = i on |j, j>
    residual_bottom: float  # Gamma = -i on |j, -j>
    cross_top: float  # Gamma = i on |j, -j>
    cross_bottom: float  # Gamma = -i on |j, j>
    ladder_error: float
    min_max_residual: float  # best single Gamma, scanned
    min_max_closed: float
    best_gamma: complex

    @property
    def jointly_solvable(self) -> bool:
        return self.min_max_residual < 1e-8

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["best_gamma"] = [self.best_gamma.real, self.best_gamma.imag]
        d["jointly_solvable"] = self.jointly_solvable
        return d


def spin_no_saturation_check(sys: SpinSystem, scan_points: int = 201, scan_extent: float = 3.0) -> SpinNoSaturation:
    """Check that no single Gamma annihilates both |j, j> and |j, -j>.

    Uses Jx + Gamma Jy = (1 - i Gamma)/2 J+ + (1 + i Gamma)/2 J-; each extreme
    state alone is annihilated (Gamma = +i and -i respectively), but the
    smallest achievable max-residual over both is sqrt(j/2) at Gamma = 0.
    """
    top, bottom = sys.state(sys.j), sys.state(-sys.j)
    jx, jy = sys.jx, sys.jy

    def res(g, s):
        return annihilation_residual(jx, jy, g, 0.0, 0.0, s)

    ladder = 0.0
    for g in (1j, -1j, 0.3 - 0.7j, 2.0):
        lhs = jx + g * jy
        rhs = 0.5 * (1 - 1j * g) * sys.jplus + 0.5 * (1 + 1j * g) * sys.jminus
        ladder = max(ladder, float(np.max(np.abs(lhs - rhs))))

    # Gamma grid over the complex plane; vectorised residual norms
    axis = np.linspace(-scan_extent, scan_extent, scan_points)
    g = axis[:, None] + 1j * axis[None, :]
    vt, vb = top.amplitudes, bottom.amplitudes
    rt = np.linalg.norm((jx @ vt)[None, None, :] + g[..., None] * (jy @ vt)[None, None, :], axis=-1)
    rb = np.linalg.norm((jx @ vb)[None, None, :] + g[..., None] * (jy @ vb)[None, None, :], axis=-1)
    worst = np.maximum(rt, rb)
    k = np.unravel_index(np.argmin(worst), worst.shape)

    return SpinNoSaturation(
        j=sys.j,
        residual_top=res(1j, top),
        residual_bottom=res(-1j, bottom),
        cross_top=res(1j, bottom),
        cross_bottom=res(-1j, top),
        ladder_error=ladder,
        min_max_residual=float(worst[k]),
        min_max_closed=math.sqrt(sys.j / 2),
        best_gamma=complex(g[k]),
    )


# --------------------------------------------------------------------------
# truncated oscillator


@dataclass(frozen=True)
class FockSystem:
    """Harmonic oscillator truncated to number states 0..cutoff."""

    cutoff: int = 60
    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if min(self.mass, self.omega, self.hbar) <= 0:
            raise ValueError("mass, omega and hbar must be positive")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @cached_property
    def annihilation(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim)), k=1).astype(complex)

    @cached_property
    def x(self) -> np.ndarray:
        a = self.annihilation
        return math.sqrt(self.hbar / (2 * self.mass * self.omega)) * (a + a.conj().T)

    @cached_property
    def p(self) -> np.ndarray:
        a = self.annihilation
        return 1j * math.sqrt(self.hbar * self.mass * self.omega / 2) * (a.conj().T - a)

    @cached_property
    def h(self) -> np.ndarray:
        return np.diag(self.hbar * self.omega * (np.arange(self.dim) + 0.5)).astype(complex)

    def operator(self, name: str) -> np.ndarray:
        return {"X": self.x, "P": self.p, "H": self.h, "a": self.annihilation}[name]

    def number_state(self, n: int) -> StateVector:
        if not 0 <= n <= self.cutoff:
            raise ValueError(f"n = {n} outside 0..{self.cutoff}")
        return StateVector(basis(self.dim, n))

    def number_variances(self, n: int) -> tuple[float, float]:
        """Closed-form (var X, var P) in |n>."""
        return (
            (2 * n + 1) * self.hbar / (2 * self.mass * self.omega),
            (2 * n + 1) * self.hbar * self.mass * self.omega / 2,
        )

    def gibbs(self, beta: float) -> DensityMatrix:
        """Truncated thermal state with weights exp(-beta n), renormalised."""
        if beta <= 0:
            raise ValueError("beta must be positive")
        w = np.exp(-beta * np.arange(self.dim))
        return DensityMatrix(np.diag(w / w.sum()).astype(complex))

    def fock_mixture(self, weights) -> DensityMatrix:
        w = np.zeros(self.dim)
        w[: len(weights)] = weights
        return DensityMatrix(np.diag(w / w.sum()).astype(complex))


def converged_in_cutoff(fn, system: FockSystem, rtol: float = 1e-8) -> float:
    """fn(system), after checking it barely moves when the cutoff doubles."""
    value = float(fn(system))
    doubled = float(fn(replace(system, cutoff=2 * system.cutoff)))
    if abs(doubled - value) > rtol * max(1.0, abs(value)):
        raise NoConvergence(f"cutoff {system.cutoff} -> {2 * system.cutoff} moved the result by {doubled - value:.3e}")
    return value


def gibbs_beta_for_purity(mu: float) -> float:
    """beta with (untruncated) thermal purity tanh(beta/2) = mu."""
    if not 0 < mu < 1:
        raise ValueError("purity must lie in (0, 1)")
    return 2 * math.atanh(mu)


# --------------------------------------------------------------------------
# position grids


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid of ``points`` samples on [center - extent, center + extent)."""

    extent: float
    points: int = 512
    center: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.extent <= 0 or self.points < 4:
            raise ValueError("grid needs positive extent and at least 4 points")

    @property
    def dx(self) -> float:
        return 2 * self.extent / self.points

    @cached_property
    def x(self) -> np.ndarray:
        return self.center - self.extent + self.dx * np.arange(self.points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.dx)

    def position_matrix(self) -> np.ndarray:
        return np.diag(self.x).astype(complex)

    def momentum_matrix(self, method: str = "spectral") -> np.ndarray:
        """-i hbar d/dx as a dense Hermitian matrix."""
        n = self.points
        if method == "spectral":
            f = np.fft.fft(np.eye(n), axis=0, norm="ortho")
            p = f.conj().T @ (self.hbar * self.k[:, None] * f)
        elif method == "fd":
            p = np.zeros((n, n), dtype=complex)
            idx = np.arange(n)
            c = -1j * self.hbar / (2 * self.dx)
            p[idx, (idx + 1) % n] = c
            p[idx, (idx - 1) % n] = -c
        else:
            raise ValueError(f"unknown derivative method {method!r}")
        return 0.5 * (p + p.conj().T)

    def sample(self, f) -> StateVector:
        return StateVector(f(self.x))


def grid_moments(psi: StateVector, grid: Grid1D) -> tuple[float, float, float, float]:
    """(<x>, <p>, dx, dp) of a grid state, momentum via FFT."""
    v = psi.amplitudes
    if v.size != grid.points:
        raise DimensionMismatch("state and grid sizes differ")
    prob = np.abs(v) ** 2
    mx = float(np.sum(prob * grid.x))
    vx = float(np.sum(prob * (grid.x - mx) ** 2))
    pk = np.abs(np.fft.fft(v, norm="ortho")) ** 2
    p = grid.hbar * grid.k
    mp = float(np.sum(pk * p))
    vp = float(np.sum(pk * (p - mp) ** 2))
    return mx, mp, math.sqrt(vx), math.sqrt(vp)


@dataclass(frozen=True)
class GaussianPacket:
    """<x|psi> = (2 pi s^2)^(-1/4) exp(i p x / hbar) exp(-(x - x0)^2 / (4 s^2))."""

    center: float
    momentum: float
    sigma: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")

    def wavefunction(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        norm = (2 * np.pi * self.sigma**2) ** -0.25
        return norm * np.exp(1j * self.momentum * x / self.hbar - (x - self.center) ** 2 / (4 * self.sigma**2))

    def default_grid(self, points: int = 512) -> Grid1D:
        return Grid1D(extent=12 * self.sigma, points=points, center=self.center, hbar=self.hbar)

    def on_grid(self, grid: Grid1D | None = None) -> StateVector:
        grid = grid or self.default_grid()
        return grid.sample(self.wavefunction)


def gaussian_moments(p: GaussianPacket) -> tuple[float, float, float, float]:
    """(<x>, <p>, dx, dp) in closed form."""
    return p.center, p.momentum, p.sigma, p.hbar / (2 * p.sigma)


def pq_gaussian_solution(
    mean_p: float,
    mean_q: float,
    gamma_i: float,
    grid: Grid1D | None = None,
    gamma_r: float = 0.0,
    hbar: float = 1.0,
) -> StateVector:
    """Grid solution of (P - <P>) + Gamma (Q - <Q>) annihilating psi.

    Gamma = gamma_r - i gamma_i with gamma_i > 0 (the normalisable branch),
    giving

        psi(q) ~ exp(i <P> q / hbar) exp(-gamma_i (q - <Q>)^2 / (2 hbar))
                 exp(-i gamma_r (q - <Q>)^2 / (2 hbar)),

    so that var Q = hbar / (2 gamma_i).  ``gamma_r = 0`` is the HUR case.
    """
    if gamma_i <= 0:
        raise ValueError("gamma_i must be positive")
    if grid is None:
        dq = math.sqrt(hbar / (2 * gamma_i))
        grid = Grid1D(extent=12 * dq, points=512, center=mean_q, hbar=hbar)

    def f(q):
        s = q - mean_q
        return np.exp(1j * mean_p * q / hbar - (gamma_i + 1j * gamma_r) * s**2 / (2 * hbar))

    psi = grid.sample(f)
    _check_edges(np.abs(psi.amplitudes), "pq Gaussian")
    return psi


def pq_residual(psi: StateVector, grid: Grid1D, mean_p: float, mean_q: float, gamma: complex) -> float:
    """|| ((P - <P>) + gamma (Q - <Q>)) psi || with the spectral momentum."""
    return annihilation_residual(grid.momentum_matrix(), grid.position_matrix(), gamma, mean_p, mean_q, psi)


def _check_edges(amplitude: np.ndarray, what: str, tol: float = 1e-6) -> None:
    # amplitude ratio 1e-6 leaves ~1e-12 of the probability outside the box
    peak = amplitude.max()
    if amplitude.ndim == 1:
        edge = max(amplitude[0], amplitude[-1])
    else:
        edge = max(amplitude[0].max(), amplitude[-1].max(), amplitude[:, 0].max(), amplitude[:, -1].max())
    if edge > tol * peak:
        raise GridTooCoarse(f"{what}: wavefunction not contained in the grid (edge/peak {edge / peak:.2e})")


# --------------------------------------------------------------------------
# EPR-like two-mode Gaussian


@dataclass(frozen=True)
class EPRMoments:
    dxa: float
    dpa: float
    dxa_grid: float | None = None
    dpa_grid: float | None = None

    @property
    def product(self) -> float:
        return self.dxa * self.dpa

    @property
    def product_grid(self) -> float | None:
        if self.dxa_grid is None:
            return None
        return self.dxa_grid * self.dpa_grid


@dataclass(frozen=True)
class EPRGaussian:
    """Psi(xA, xB) ~ exp(-(xA - xB)^2 sigma^2) exp(-(xA + xB)^2 / (16 Omega^2)).

    Product state exactly when Omega = 1/(4 sigma).
    """

    sigma: float
    omega: float
    hbar: float = 1.0
    points: int = 512
    extent: float | None = None

    def __post_init__(self):
        if self.sigma <= 0 or self.omega <= 0:
            raise ValueError("sigma and Omega must be positive")
        if self.points < 8:
            raise ValueError("grid needs at least 8 points per axis")

    @property
    def grid_extent(self) -> float:
        if self.extent is not None:
            return self.extent
        return 12.0 * max(self.omega, 1.0 / (4.0 * self.sigma))

    def grid(self, points: int | None = None) -> Grid1D:
        return Grid1D(extent=self.grid_extent, points=points or self.points, hbar=self.hbar)

    def amplitudes(self, points: int | None = None) -> np.ndarray:
        x = self.grid(points).x
        xa, xb = x[:, None], x[None, :]
        psi = np.exp(-((xa - xb) ** 2) * self.sigma**2 - (xa + xb) ** 2 / (16 * self.omega**2))
        return psi / np.linalg.norm(psi)

    def bipartite(self, points: int | None = None) -> BipartiteState:
        n = points or self.points
        return BipartiteState(n, n, self.amplitudes(n))

    def closed_form(self) -> EPRMoments:
        return EPRMoments(
            dxa=math.sqrt(self.omega**2 + 1 / (16 * self.sigma**2)),
            dpa=self.hbar * math.sqrt(self.sigma**2 + 1 / (16 * self.omega**2)),
        )


def _epr_grid_moments(e: EPRGaussian, points: int, method: str) -> tuple[float, float]:
    g = e.grid(points)
    psi = e.amplitudes(points)
    _check_edges(np.abs(psi), "EPR state")
    prob = np.abs(psi) ** 2
    marg = prob.sum(axis=1)
    mx = np.sum(marg * g.x)
    vx = np.sum(marg * (g.x - mx) ** 2)
    if method == "spectral":
        pk = (np.abs(np.fft.fft(psi, axis=0, norm="ortho")) ** 2).sum(axis=1)
        p = e.hbar * g.k
        mp = np.sum(pk * p)
        vp = np.sum(pk * (p - mp) ** 2)
    elif method == "fd":
        dpsi = -1j * e.hbar * (np.roll(psi, -1, axis=0) - np.roll(psi, 1, axis=0)) / (2 * g.dx)
        mp = np.vdot(psi, dpsi).real
        vp = np.vdot(dpsi, dpsi).real - mp**2
    else:
        raise ValueError(f"unknown derivative method {method!r}")
    return math.sqrt(vx), math.sqrt(max(vp, 0.0))


def epr_moments(e: EPRGaussian, method: str = "spectral", rtol: float = 1e-6) -> EPRMoments:
    """Closed-form and grid-integrated (dX_A, dP_A).

    The grid result is compared with the same extent sampled at half the
    resolution; a relative change above ``rtol`` raises GridTooCoarse.
    """
    cf = e.closed_form()
    dx, dp = _epr_grid_moments(e, e.points, method)
    dx2, dp2 = _epr_grid_moments(e, e.points // 2, method)
    drift = max(abs(dx - dx2) / dx, abs(dp - dp2) / dp)
    if drift > rtol:
        raise GridTooCoarse(f"grid moments moved by {drift:.2e} between {e.points // 2} and {e.points} points")
    return EPRMoments(cf.dxa, cf.dpa, dx, dp)


def epr_schmidt_rank(e: EPRGaussian, rel_tol: float = 1e-10) -> tuple[int, np.ndarray]:
    """Numerical Schmidt rank of the sampled state and its coefficients."""
    state = e.bipartite()
    dec = schmidt(state)
    c = dec.coefficients
    return int(np.count_nonzero(c > rel_tol * c[0])), c


# --------------------------------------------------------------------------
# JSON model specs


def model_from_spec(spec: dict):
    """Build a model from {"type": "spin" | "fock" | "epr" | "grid", ...}."""
    kind = spec.get("type")
    if kind == "spin":
        return SpinSystem(int(spec["j2"]))
    if kind == "fock":
        return FockSystem(
            cutoff=int(spec.get("cutoff", 60)),
            mass=float(spec.get("mass", 1.0)),
            omega=float(spec.get("omega", 1.0)),
            hbar=float(spec.get("hbar", 1.0)),
        )
    if kind == "epr":
        grid = spec.get("grid", {})
        return EPRGaussian(
            sigma=float(spec["sigma"]),
            omega=float(spec["omega"]),
            hbar=float(spec.get("hbar", 1.0)),
            points=int(grid.get("points", 512)),
            extent=grid.get("extent"),
        )
    if kind == "grid":
        return Grid1D(
            extent=float(spec["extent"]),
            points=int(spec.get("points", 512)),
            center=float(spec.get("center", 0.0)),
            hbar=float(spec.get("hbar", 1.0)),
        )
    raise ValueError(f"unknown model type {kind!r}")
