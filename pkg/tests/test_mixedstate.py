import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minunc.errors import DomainError, ZeroVariance
from minunc.linalg import (
    SIGMA_X,
    SIGMA_Y,
    BipartiteState,
    DensityMatrix,
    basis,
    random_bipartite,
    random_density,
    random_hermitian,
)
from minunc.mixedstate import (
    BETA_PURE,
    bastiaans_rhs,
    d_curve,
    entropic_rhs,
    entropic_rhs_from_beta,
    entropy_of_beta,
    entropy_to_beta,
    equivalence_check,
    minimum_state_condition,
    phi_of_mu,
    purity_bounds,
    saturator,
)
from minunc.models import FockSystem, gibbs_beta_for_purity

mp.mp.dps = 30

# frozen from mpmath (see _mp_phi / _mp_entropy below)
PHI_HALF = 1.83822263836861
PHI_EIGHT_NINTHS = 1.100925212577
S_BETA_ONE = 1.040651852256408
ENTROPIC_FACTOR_BETA_ONE = 4.682694376831169


def _mp_phi(mu):
    mu = mp.mpf(mu)
    return (4 + mp.sqrt(16 + 9 * mu**2)) / (9 * mu)


def _mp_entropy(beta):
    b = mp.mpf(beta)
    return b / (mp.e**b - 1) - mp.log(1 - mp.e ** (-b))


def test_frozen_constants_match_mpmath():
    assert float(_mp_phi(0.5)) == pytest.approx(PHI_HALF, abs=1e-13)
    assert float(_mp_phi(mp.mpf(8) / 9)) == pytest.approx(PHI_EIGHT_NINTHS, abs=1e-12)
    assert float(_mp_entropy(1)) == pytest.approx(S_BETA_ONE, abs=1e-14)
    assert float((1 + 2 / (mp.e - 1)) ** 2) == pytest.approx(ENTROPIC_FACTOR_BETA_ONE, abs=1e-14)


def test_d_curve_examples():
    zero = DensityMatrix(np.diag([1.0, 0.0]))
    c = d_curve(SIGMA_X, SIGMA_Y, zero, "HUR")
    assert c.a_min == pytest.approx(1)
    assert abs(c.minimizer_value) < 1e-14
    c = d_curve(SIGMA_X, SIGMA_Y, DensityMatrix(np.eye(2) / 2), "HUR")
    assert c.a_min == pytest.approx(0)
    assert c.minimizer_value == pytest.approx(1)
    f = FockSystem(60)
    c = d_curve(f.x, f.p, DensityMatrix.from_state(f.number_state(0)), "SR")
    assert c.minimizer_point == pytest.approx(1j, abs=1e-12)
    assert abs(c.minimizer_value) < 1e-12


def test_d_curve_zero_variance():
    with pytest.raises(ZeroVariance):
        d_curve(SIGMA_X, np.diag([1.0, -1.0]), DensityMatrix(np.diag([1.0, 0.0])))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.sampled_from(["HUR", "SR"]))
@settings(max_examples=100, deadline=None)
def test_d_curve_shape(dim, seed, kind):
    rng = np.random.default_rng(seed)
    x, y = random_hermitian(dim, rng), random_hermitian(dim, rng)
    rho = random_density(dim, rng)
    c = d_curve(x, y, rho, kind)
    a = np.linspace(-5, 5, 101)
    assert np.all(c(a) >= -1e-9)
    # second derivative along the imaginary axis equals 2 var Y
    h = 1e-3
    g0 = c.minimizer_point
    d2 = (c(g0 + 1j * h) - 2 * c(g0) + c(g0 - 1j * h)) / h**2
    assert d2 / 2 == pytest.approx(c.var_y, rel=1e-6)


def test_saturator_matches_minimum():
    rng = np.random.default_rng(8)
    for _ in range(100):
        d = int(rng.integers(2, 6))
        x, y = random_hermitian(d, rng), random_hermitian(d, rng)
        rho = random_density(d, rng)
        for kind in ("HUR", "SR"):
            c = saturator(x, y, rho, kind)
            assert abs(c.expectation_ctc() - d_curve(x, y, rho, kind).minimizer_value) < 1e-10


def test_minimum_state_condition_examples():
    f = FockSystem(60)
    ground = DensityMatrix.from_state(f.number_state(0))
    res = minimum_state_condition(saturator(f.x, f.p, ground, "SR"), ground, tol=1e-6)
    assert res.saturates

    mix = f.fock_mixture([0.5, 0.5])
    res = minimum_state_condition(saturator(f.x, f.p, mix, "SR"), mix)
    assert not res.saturates
    assert res.residuals.max() > 0.5

    half = DensityMatrix(np.eye(2) / 2)
    res = minimum_state_condition(saturator(SIGMA_X, SIGMA_Y, half, "HUR"), half)
    assert not res.saturates
    assert res.trace_ctc == pytest.approx(1)


def test_phi_examples():
    assert phi_of_mu(1.0) == 1.0
    assert phi_of_mu(0.5) == pytest.approx(PHI_HALF, abs=1e-12)
    assert phi_of_mu(8 / 9) == pytest.approx(PHI_EIGHT_NINTHS, abs=1e-12)


def test_phi_above_one_on_fine_grid():
    mu = np.linspace(1e-3, 1 - 1e-9, 20001)
    assert all(phi_of_mu(m) > 1 for m in mu)


@pytest.mark.parametrize("mu", [0.0, -0.1, 1.01])
def test_phi_domain(mu):
    with pytest.raises(DomainError):
        phi_of_mu(mu)


def test_bastiaans_examples():
    assert bastiaans_rhs(8 / 9) == pytest.approx(0.5)
    assert bastiaans_rhs(1.0) == pytest.approx(0.5 * 8 / 9)
    assert bastiaans_rhs(0.5) == pytest.approx(0.5 * 16 / 9)


def test_entropy_beta_examples():
    assert entropy_to_beta(0.0) == BETA_PURE
    assert entropy_of_beta(1.0) == pytest.approx(S_BETA_ONE, abs=1e-14)
    assert entropy_to_beta(S_BETA_ONE) == pytest.approx(1.0, abs=1e-8)
    b = entropy_to_beta(math.log(2))
    assert entropy_of_beta(b) == pytest.approx(math.log(2), abs=1e-12)


def test_entropy_round_trip():
    for s in np.geomspace(1e-6, 10, 400):
        assert abs(entropy_of_beta(entropy_to_beta(s)) - s) < 1e-10


def test_entropy_domain():
    with pytest.raises(DomainError):
        entropy_to_beta(-1)


def test_entropic_rhs_examples():
    assert entropic_rhs(0.0) == 0.25
    assert entropic_rhs_from_beta(1.0) == pytest.approx(0.25 * ENTROPIC_FACTOR_BETA_ONE, abs=1e-14)
    assert entropic_rhs(math.log(2)) >= 0.25
    assert entropic_rhs(0.0, hbar=2.0) == 1.0


def test_thermal_family_bounds():
    f = FockSystem(60)
    for mu in np.linspace(0.3, 0.99, 30):
        rep = purity_bounds(f.gibbs(gibbs_beta_for_purity(mu)), f.x, f.p)
        assert rep.mu == pytest.approx(mu, abs=1e-10)
        assert rep.dm_lhs >= rep.dm_rhs - 1e-6
        # thermal states sit on the entropic bound
        assert rep.dm_lhs == pytest.approx(rep.entropic_rhs, abs=1e-8)
        assert rep.bastiaans_satisfied
    ground = purity_bounds(DensityMatrix.from_state(f.number_state(0)), f.x, f.p)
    assert ground.mu == pytest.approx(1)
    assert ground.beta == BETA_PURE
    assert ground.satisfied
    assert ground.dm_lhs - ground.dm_rhs == pytest.approx(0, abs=1e-12)


def test_purity_bound_row_fields():
    f = FockSystem(20)
    row = purity_bounds(f.fock_mixture([0.6, 0.4]), f.x, f.p).to_row()
    assert list(row) == ["mu", "phi", "dmLHS", "dmRHS", "S", "beta", "entropicRHS", "satisfied"]


def test_equivalence_examples():
    bell = BipartiteState(2, 2, np.array([1, 0, 0, 1]) / math.sqrt(2))
    rep = equivalence_check(bell, SIGMA_X, SIGMA_Y)
    assert rep.agree
    assert rep.pure.product == pytest.approx(1)
    assert abs(rep.pure.hur_rhs) < 1e-15

    prod = BipartiteState(2, 3, np.kron(basis(2, 0), basis(3, 1)))
    rep = equivalence_check(prod, SIGMA_X, SIGMA_Y)
    assert rep.agree
    assert rep.reduced.hur_gap == pytest.approx(0, abs=1e-14)


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_equivalence_random(da, db, seed):
    rng = np.random.default_rng(seed)
    psi = random_bipartite(da, db, rng)
    assert equivalence_check(psi, random_hermitian(da, rng), random_hermitian(da, rng)).agree
