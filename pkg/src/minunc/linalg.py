"""Dense complex linear algebra: states, density matrices, Schmidt form.

Operators are plain ``numpy`` complex arrays.  States and density matrices
are small frozen dataclasses that validate (and normalise) on construction
and hold read-only arrays, so every function here is pure.

Conventions
-----------
* Bipartite amplitudes ``d[i, j]`` are indexed with ``i`` over H_A and ``j``
  over H_B.  The flattened vector is row-major, which matches
  ``np.kron(op_a, op_b)`` acting on it.
* Units are whatever the caller's operators carry; all tolerances are
  absolute and assume unit-normalised states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EigenFailure,
    FactorizationError,
    NonHermitian,
    NotADensityMatrix,
)

HERMITIAN_ATOL = 1e-12
IMAG_ATOL = 1e-10
NEGATIVE_EIG_ATOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def is_hermitian(m, atol: float = HERMITIAN_ATOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def assert_hermitian(m, name: str = "operator", atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} is not square: {a.shape}")
    dev = np.max(np.abs(a - a.conj().T), initial=0.0)
    if dev > atol:
        raise NonHermitian(f"{name} deviates from Hermitian by {dev:.3e}")
    return a


def basis(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


@dataclass(frozen=True)
class StateVector:
    """Unit-norm pure state.  The constructor normalises its input."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if v.size == 0 or not np.isfinite(norm) or norm == 0.0:
            raise ValueError("cannot normalise a zero or non-finite vector")
        object.__setattr__(self, "amplitudes", _frozen(v / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class BipartiteState:
    """Pure state on H_A (x) H_B, stored as the d_A x d_B amplitude matrix."""

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.amplitudes, dtype=complex)
        if d.size != self.dim_a * self.dim_b:
            raise DimensionMismatch(
                f"{d.size} amplitudes for dims ({self.dim_a}, {self.dim_b})"
            )
        d = d.reshape(self.dim_a, self.dim_b)
        norm = np.linalg.norm(d)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("cannot normalise a zero or non-finite state")
        object.__setattr__(self, "amplitudes", _frozen(d / norm))

    @classmethod
    def from_vector(cls, vec, dim_a: int, dim_b: int) -> "BipartiteState":
        return cls(dim_a, dim_b, np.asarray(vec).reshape(dim_a, dim_b))

    @classmethod
    def product(cls, psi_a, psi_b) -> "BipartiteState":
        a = np.asarray(getattr(psi_a, "amplitudes", psi_a), dtype=complex).reshape(-1)
        b = np.asarray(getattr(psi_b, "amplitudes", psi_b), dtype=complex).reshape(-1)
        return cls(a.size, b.size, np.outer(a, b))

    @property
    def vector(self) -> StateVector:
        return StateVector(self.amplitudes.reshape(-1))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Psi = sum_i c_i |a_i>|b_i>, coefficients in descending order.

    ``basis_a[i]`` and ``basis_b[i]`` are the i-th Schmidt vectors.  All
    ``min(d_A, d_B)`` terms are kept; ``rank`` counts those above
    ``rank_tolerance``.
    """

    coefficients: np.ndarray
    basis_a: np.ndarray
    basis_b: np.ndarray
    rank: int
    rank_tolerance: float

    def reconstruct(self) -> np.ndarray:
        return np.einsum("k,ki,kj->ij", self.coefficients, self.basis_a, self.basis_b)

    def support_a(self) -> list[StateVector]:
        return [StateVector(self.basis_a[k]) for k in range(self.rank)]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive, unit-trace operator.  Validated, not repaired."""

    matrix: np.ndarray
    _eigs: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise NotADensityMatrix(f"density matrix must be square, got {m.shape}")
        dev = np.max(np.abs(m - m.conj().T), initial=0.0)
        if dev > HERMITIAN_ATOL:
            raise NotADensityMatrix(f"not Hermitian (deviation {dev:.3e})")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > HERMITIAN_ATOL:
            raise NotADensityMatrix(f"trace is {float(tr):.6g}, expected 1")
        try:
            w, v = np.linalg.eigh(m)
        except np.linalg.LinAlgError as exc:
            raise EigenFailure(str(exc)) from exc
        if w[0] < -NEGATIVE_EIG_ATOL:
            raise NotADensityMatrix(f"negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "_eigs", (w, v))

    @classmethod
    def from_state(cls, psi) -> "DensityMatrix":
        v = psi if isinstance(psi, StateVector) else StateVector(psi)
        return cls(v.projector())

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix":
        """sum_k w_k |psi_k><psi_k| with the weights renormalised."""
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise NotADensityMatrix("mixture weights must be non-negative")
        w = w / w.sum()
        vecs = [s if isinstance(s, StateVector) else StateVector(s) for s in states]
        m = sum(wk * v.projector() for wk, v in zip(w, vecs))
        return cls(m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and eigenvectors as columns."""
        return self._eigs


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def _state_dim(state) -> int:
    if isinstance(state, DensityMatrix):
        return state.dim
    return state.dim


def _check_dims(o: np.ndarray, state) -> None:
    if o.shape[0] != o.shape[1] or o.shape[0] != _state_dim(state):
        raise DimensionMismatch(
            f"operator shape {o.shape} does not act on a {_state_dim(state)}-dim state"
        )


def _real(z: complex, what: str) -> float:
    if abs(z.imag) > IMAG_ATOL * max(1.0, abs(z.real)):
        raise NonHermitian(f"{what} has imaginary part {z.imag:.3e}")
    return float(z.real)


def expectation(o, state) -> float:
    """<psi|O|psi> for a StateVector, tr(rho O) for a DensityMatrix."""
    o = assert_hermitian(o)
    _check_dims(o, state)
    if isinstance(state, DensityMatrix):
        z = np.trace(state.matrix @ o)
    else:
        psi = state.amplitudes
        z = np.vdot(psi, o @ psi)
    return _real(complex(z), "expectation value")


def raw_expectation(o, state) -> complex:
    """Complex <O> with no Hermiticity requirement (commutators etc.)."""
    o = as_matrix(o)
    _check_dims(o, state)
    if isinstance(state, DensityMatrix):
        return complex(np.trace(state.matrix @ o))
    psi = state.amplitudes
    return complex(np.vdot(psi, o @ psi))


def centered(o, state) -> np.ndarray:
    """O - <O> 1."""
    o = as_matrix(o)
    return o - expectation(o, state) * np.eye(o.shape[0])


def variance(o, state) -> float:
    ot = centered(o, state)
    if isinstance(state, DensityMatrix):
        v = _real(complex(np.trace(state.matrix @ ot @ ot)), "variance")
    else:
        v = float(np.linalg.norm(ot @ state.amplitudes) ** 2)
    if v < -NEGATIVE_EIG_ATOL:
        raise EigenFailure(f"variance {v:.3e} is negative beyond tolerance")
    return max(v, 0.0)


def commutator(x, y) -> np.ndarray:
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape}")
    return x @ y - y @ x


def anticommutator(x, y) -> np.ndarray:
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape}")
    return x @ y + y @ x


def schmidt(state: BipartiteState, rank_tol: float | None = None) -> SchmidtDecomposition:
    """Schmidt decomposition from the SVD of the amplitude matrix.

    ``rank_tol`` is absolute; by default it is 1e-10 times the largest
    coefficient.  Inside degenerate coefficient subspaces the returned
    bases are whatever the SVD produced.
    """
    if rank_tol is not None and rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    try:
        u, s, vh = np.linalg.svd(state.amplitudes, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(str(exc)) from exc
    tol = 1e-10 * s[0] if rank_tol is None else float(rank_tol)
    rank = int(np.count_nonzero(s > tol))
    return SchmidtDecomposition(
        coefficients=s,
        basis_a=np.ascontiguousarray(u.T),
        basis_b=vh,
        rank=rank,
        rank_tolerance=tol,
    )


def partial_trace_b(state: BipartiteState) -> DensityMatrix:
    """rho^A_ik = sum_j d_ij d*_kj."""
    d = state.amplitudes
    return DensityMatrix(d @ d.conj().T)


def _spectrum(rho: DensityMatrix) -> np.ndarray:
    w = rho.eigh()[0]
    if w[0] < -NEGATIVE_EIG_ATOL:
        raise EigenFailure(f"negative eigenvalue {w[0]:.3e}")
    return np.clip(w, 0.0, 1.0)


def purity(rho: DensityMatrix) -> float:
    return float(np.sum(_spectrum(rho) ** 2))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    p = _spectrum(rho)
    p = p[p > 0]
    return float(max(-np.sum(p * np.log(p)), 0.0))


# random instances for property tests and scripts


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    return StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def random_bipartite(dim_a: int, dim_b: int, rng: np.random.Generator) -> BipartiteState:
    z = rng.normal(size=(dim_a, dim_b)) + 1j * rng.normal(size=(dim_a, dim_b))
    return BipartiteState(dim_a, dim_b, z)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (z + z.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def state_with_schmidt(coefficients, rng: np.random.Generator, dim_a: int, dim_b: int) -> BipartiteState:
    """Random local bases around prescribed Schmidt coefficients."""
    c = np.asarray(coefficients, dtype=float)
    ua = random_unitary(dim_a, rng)[:, : c.size]
    ub = random_unitary(dim_b, rng)[:, : c.size]
    return BipartiteState(dim_a, dim_b, (ua * c) @ ub.T)
