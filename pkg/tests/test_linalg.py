import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minunc.errors import DimensionMismatch, NonHermitian, NotADensityMatrix
from minunc.linalg import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    BipartiteState,
    DensityMatrix,
    StateVector,
    anticommutator,
    basis,
    commutator,
    expectation,
    partial_trace_b,
    purity,
    random_bipartite,
    random_hermitian,
    schmidt,
    state_with_schmidt,
    tensor,
    variance,
    von_neumann_entropy,
)
from minunc.models import SpinSystem

BELL = BipartiteState(2, 2, np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_tensor_examples():
    assert np.allclose(tensor(IDENTITY_2, IDENTITY_2), np.eye(4))
    assert np.allclose(tensor(SIGMA_Z, IDENTITY_2), np.diag([1, 1, -1, -1]))
    assert np.allclose(tensor(SIGMA_X, SIGMA_X) @ basis(4, 0), basis(4, 3))


@pytest.mark.parametrize(
    "op, state, expected",
    [
        (SIGMA_Z, basis(2, 0), 1.0),
        (SIGMA_X, basis(2, 0), 0.0),
    ],
)
def test_expectation_basis(op, state, expected):
    assert expectation(op, StateVector(state)) == pytest.approx(expected, abs=1e-15)


def test_expectation_spin_superposition():
    s = SpinSystem(2)
    psi = StateVector(s.state(1).amplitudes + s.state(-1).amplitudes)
    assert abs(expectation(s.jz, psi)) < 1e-15


def test_variance_examples():
    zero = StateVector(basis(2, 0))
    assert variance(SIGMA_X, zero) == pytest.approx(1.0)
    assert variance(SIGMA_Z, zero) == pytest.approx(0.0, abs=1e-15)
    s = SpinSystem(2)
    assert variance(s.jx, s.state(1)) == pytest.approx(0.5, abs=1e-14)


def test_commutator_examples():
    assert np.allclose(commutator(SIGMA_X, SIGMA_Y), 2j * SIGMA_Z)
    assert np.allclose(anticommutator(SIGMA_X, SIGMA_X), 2 * np.eye(2))
    s = SpinSystem(2)
    assert np.max(np.abs(commutator(s.jx, s.jy) - 1j * s.jz)) < 1e-12


def test_state_vector_normalises():
    psi = StateVector([3, 4j])
    assert abs(np.linalg.norm(psi.amplitudes) - 1) < 1e-12


def test_state_vector_rejects_zero():
    with pytest.raises(ValueError):
        StateVector([0, 0])


def test_bipartite_shape_checked():
    with pytest.raises(ValueError):
        BipartiteState(2, 3, np.ones(5))


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitian):
        expectation(np.array([[0, 1], [0, 0]]), StateVector([1, 0]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        expectation(SIGMA_X, StateVector([1, 0, 0]))


def test_schmidt_bell_and_product():
    dec = schmidt(BELL)
    assert dec.rank == 2
    assert np.allclose(dec.coefficients, [1 / math.sqrt(2)] * 2)
    prod = BipartiteState(2, 2, np.kron(basis(2, 0), basis(2, 1)))
    dec = schmidt(prod)
    assert dec.rank == 1
    assert dec.coefficients[0] == pytest.approx(1.0)


def test_schmidt_3x4_reconstruction():
    rng = np.random.default_rng(3)
    psi = random_bipartite(3, 4, rng)
    assert np.max(np.abs(schmidt(psi).reconstruct() - psi.amplitudes)) < 1e-10


def test_schmidt_round_trip_1000_states():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        da, db = rng.integers(1, 7, size=2)
        psi = random_bipartite(int(da), int(db), rng)
        dec = schmidt(psi)
        assert np.max(np.abs(dec.reconstruct() - psi.amplitudes)) < 1e-10
        assert abs(np.sum(dec.coefficients**2) - 1) < 1e-10
        assert dec.rank <= min(da, db)
        a = dec.basis_a[: dec.rank]
        b = dec.basis_b[: dec.rank]
        assert np.allclose(a.conj() @ a.T, np.eye(dec.rank), atol=1e-10)
        assert np.allclose(b.conj() @ b.T, np.eye(dec.rank), atol=1e-10)


def test_schmidt_rank_tolerance_is_exposed():
    psi = BipartiteState(2, 2, np.array([1, 0, 0, 1e-6]))
    assert schmidt(psi).rank == 2
    assert schmidt(psi, rank_tol=1e-5).rank == 1


@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=4), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_state_with_schmidt_recovers_coefficients(cs, seed):
    c = np.sort(np.array(cs))[::-1]
    c = c / np.linalg.norm(c)
    psi = state_with_schmidt(c, np.random.default_rng(seed), len(c) + 1, len(c))
    assert np.allclose(schmidt(psi).coefficients[: len(c)], c, atol=1e-10)


def test_partial_trace_examples():
    assert np.allclose(partial_trace_b(BELL).matrix, np.eye(2) / 2)
    psi = StateVector([1, 1j])
    prod = BipartiteState(2, 3, np.kron(psi.amplitudes, basis(3, 2)))
    assert np.allclose(partial_trace_b(prod).matrix, psi.projector())


def test_marginal_equivalence_random():
    rng = np.random.default_rng(5)
    for _ in range(200):
        da, db = rng.integers(1, 6, size=2)
        psi = random_bipartite(int(da), int(db), rng)
        o = random_hermitian(int(da), rng)
        lhs = np.trace(partial_trace_b(psi).matrix @ o).real
        rhs = expectation(tensor(o, np.eye(int(db))), psi.vector)
        assert abs(lhs - rhs) < 1e-12


def test_purity_equals_sum_c4():
    rng = np.random.default_rng(6)
    for _ in range(200):
        psi = random_bipartite(3, 4, rng)
        c = schmidt(psi).coefficients
        assert abs(purity(partial_trace_b(psi)) - np.sum(c**4)) < 1e-10


@pytest.mark.parametrize(
    "rho, mu, s",
    [
        (np.diag([1.0, 0.0]), 1.0, 0.0),
        (np.eye(2) / 2, 0.5, math.log(2)),
        # -0.7 ln 0.7 - 0.3 ln 0.3, evaluated with mpmath
        (np.diag([0.7, 0.3]), 0.58, 0.610864302054893),
    ],
)
def test_purity_entropy_examples(rho, mu, s):
    d = DensityMatrix(rho)
    assert purity(d) == pytest.approx(mu, abs=1e-12)
    assert von_neumann_entropy(d) == pytest.approx(s, abs=1e-12)


@pytest.mark.parametrize(
    "m",
    [
        np.array([[0.5, 0.1], [0.2, 0.5]]),  # not Hermitian
        np.diag([0.6, 0.6]),  # trace
        np.diag([1.2, -0.2]),  # negative eigenvalue
    ],
)
def test_density_matrix_validation(m):
    with pytest.raises(NotADensityMatrix):
        DensityMatrix(m)


def test_density_matrix_tiny_negative_allowed():
    DensityMatrix(np.diag([1 + 5e-11, -5e-11]))
