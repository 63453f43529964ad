"""Brute-force reference computations used to validate the optimisers.

Nothing here shares code with the quantities it checks: the dense scan
builds full two-qubit pure states and takes expectation values with
X (x) 1, Y (x) 1 directly, batch-wise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class ScanResult:
    delta: float
    mode: str
    grid: tuple[int, int, int]
    scan_min: float
    margin: float  # sum over axes of the largest neighbour-to-neighbour change
    argmin: tuple[float, float, float]  # (c2, theta, phi)

    @property
    def g0(self) -> float:
        """Lower bound for the true minimum: scan minimum less the margin."""
        return self.scan_min - self.margin

    def to_dict(self) -> dict:
        d = asdict(self)
        d["g0"] = self.g0
        return d


def _qubit_batch(c2: np.ndarray, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Psi = c1 |n+>|0> + c2 |n->|1> for every grid point, shape (..., 4)."""
    c1 = np.sqrt(1 - c2**2)
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    ep = np.exp(1j * phi)
    up = np.stack([ct + 0 * phi, ep * st], axis=-1)
    down = np.stack([-np.conj(ep) * st, ct + 0 * phi], axis=-1)
    psi = np.zeros(np.broadcast(c2, theta, phi).shape + (4,), dtype=complex)
    psi[..., 0] = c1 * up[..., 0]
    psi[..., 2] = c1 * up[..., 1]
    psi[..., 1] = c2 * down[..., 0]
    psi[..., 3] = c2 * down[..., 1]
    return psi


def _batch_gap(psi: np.ndarray, x: np.ndarray, y: np.ndarray, mode: str) -> np.ndarray:
    big_x = np.kron(x, np.eye(2))
    big_y = np.kron(y, np.eye(2))
    xv = psi @ big_x.T
    yv = psi @ big_y.T
    mx = np.einsum("...i,...i->...", psi.conj(), xv).real
    my = np.einsum("...i,...i->...", psi.conj(), yv).real
    xt = xv - mx[..., None] * psi
    yt = yv - my[..., None] * psi
    vx = np.einsum("...i,...i->...", xt.conj(), xt).real
    vy = np.einsum("...i,...i->...", yt.conj(), yt).real
    comm = np.einsum("...i,...i->...", xv.conj(), yv) - np.einsum("...i,...i->...", yv.conj(), xv)
    gap = vx * vy - 0.25 * np.abs(comm) ** 2
    if mode.upper() == "SR":
        anti = 2 * np.einsum("...i,...i->...", xt.conj(), yt).real
        gap = gap - 0.25 * anti**2
    return gap


def qubit_gap_scan(
    x: np.ndarray,
    y: np.ndarray,
    delta: float,
    mode: str = "SR",
    n_c: int = 121,
    n_theta: int = 121,
    n_phi: int = 241,
) -> ScanResult:
    """Dense scan of the uncertainty gap over two-qubit pure states with
    both Schmidt coefficients >= delta.

    The gap only depends on the reduced state of the first qubit, so the
    scan runs over (smaller Schmidt coefficient, Bloch direction) with the
    second qubit's Schmidt basis fixed to the computational basis.
    """
    c2 = np.linspace(delta, 1 / math.sqrt(2), n_c)
    theta = np.linspace(0, math.pi, n_theta)
    phi = np.linspace(0, 2 * math.pi, n_phi)
    gap = np.empty((n_c, n_theta, n_phi))
    for k, c in enumerate(c2):
        psi = _qubit_batch(np.full((n_theta, n_phi), c), theta[:, None], phi[None, :])
        gap[k] = _batch_gap(psi, np.asarray(x), np.asarray(y), mode)
    margin = sum(float(np.max(np.abs(np.diff(gap, axis=ax)))) for ax in range(3))
    k = np.unravel_index(np.argmin(gap), gap.shape)
    return ScanResult(
        delta=float(delta),
        mode=mode.upper(),
        grid=(n_c, n_theta, n_phi),
        scan_min=float(gap[k]),
        margin=margin,
        argmin=(float(c2[k[0]]), float(theta[k[1]]), float(phi[k[2]])),
    )
