import json
from pathlib import Path

import numpy as np
import pytest

from minunc.errors import NoProgress
from minunc.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, BipartiteState, schmidt
from minunc.models import SpinSystem
from minunc.search import (
    SearchProblem,
    block_witness_observables,
    enforce_floor,
    minimize_gap,
    saturation_hunt,
    verify_result,
)
from minunc.uncertainty import Mode, Verdict, saturation_analysis

FIXTURE = Path(__file__).parent / "fixtures" / "g0_qubit_pauli.json"


def test_problem_validation():
    with pytest.raises(ValueError, match="commute"):
        SearchProblem(2, 2, SIGMA_Z, np.eye(2))
    with pytest.raises(ValueError, match="infeasible"):
        SearchProblem(2, 2, SIGMA_X, SIGMA_Y, min_schmidt_coeff=0.8)
    with pytest.raises(ValueError):
        SearchProblem(3, 2, SIGMA_X, SIGMA_Y)


def test_problem_round_trip():
    p = SearchProblem(2, 3, SIGMA_X, SIGMA_Y, "HUR", 0.2, seed=5, restarts=2, rank=2)
    q = SearchProblem.from_dict(json.loads(json.dumps(p.to_dict())))
    assert q.to_dict() == p.to_dict()
    assert q.mode is Mode.HUR


@pytest.mark.parametrize("floor, terms", [(0.3, 2), (0.2, 3), (0.5, 3), (0.0, 2)])
def test_enforce_floor(floor, terms):
    rng = np.random.default_rng(0)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    m[:, -1] *= 1e-3
    out = enforce_floor(m, floor, terms)
    c = np.linalg.svd(out, compute_uv=False)
    assert abs(np.linalg.norm(out) - 1) < 1e-12
    assert c[:terms].min() >= floor - 1e-10
    assert np.sum(c[terms:] ** 2) < 1e-20


def test_qubit_gap_matches_analytic_minimum():
    # min over reduced states with both eigenvalues >= d^2 is 4 d^2 (1 - d^2)
    for delta in (0.2, 0.3, 0.5):
        r = minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", delta, restarts=2))
        assert r.best_gap == pytest.approx(4 * delta**2 * (1 - delta**2), abs=1e-6)
        assert r.schmidt_profile.min() >= delta - 1e-10


def test_qubit_gap_above_g0():
    g0 = json.loads(FIXTURE.read_text())
    for mode in ("SR", "HUR"):
        r = minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, mode, 0.3))
        assert r.best_gap >= g0[mode]["g0"]


def test_delta_zero_reaches_product_state():
    r = minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", 0.0, restarts=2))
    assert abs(r.best_gap) < 1e-8
    assert r.best_gap >= -1e-9


def test_result_invariants_and_recheck():
    p = SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", 0.3, restarts=3, seed=4)
    r = minimize_gap(p)
    assert verify_result(p, r) < 1e-10
    assert all(a >= b for a, b in zip(r.best_by_restart, r.best_by_restart[1:]))
    assert r.feasible_restarts >= 1
    assert r.iterations > 0
    assert not r.witness


def test_determinism():
    p = SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "HUR", 0.25, restarts=2, seed=13)
    assert minimize_gap(p).to_json() == minimize_gap(p).to_json()


def test_block_witness_is_analytic_saturator():
    x, y = block_witness_observables()
    assert np.linalg.norm(x @ y - y @ x) > 1
    amps = np.zeros((3, 3), complex)
    amps[0, 0], amps[2, 1] = 0.6, 0.8
    rep = saturation_analysis(x, y, BipartiteState(3, 3, amps), "SR")
    assert rep.verdict is Verdict.SATURABLE
    assert rep.rank == 2


def test_hunt_finds_rank_two_witness():
    x, y = block_witness_observables()
    p = SearchProblem(3, 3, x, y, "HUR", 0.3, seed=2, rank=2)
    r = saturation_hunt(p)
    assert r.witness and r.best_gap < 1e-6
    assert verify_result(p, r) < 1e-10
    dec = schmidt(r.best_state)
    assert dec.rank == 2
    assert dec.coefficients[1] >= 0.3 - 1e-10


def test_hunt_rank_one_is_single_system_minimum():
    p = SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "HUR", 0.0, rank=1, restarts=2)
    r = saturation_hunt(p)
    assert abs(r.best_gap) < 1e-8
    assert schmidt(r.best_state).rank == 1


def test_hunt_requires_rank_below_dim_a():
    with pytest.raises(ValueError):
        saturation_hunt(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, rank=2))


def test_no_progress_when_floor_unreachable(monkeypatch):
    import minunc.search as search

    monkeypatch.setattr(search, "FEASIBILITY_SLACK", -1.0)
    with pytest.raises(NoProgress):
        minimize_gap(SearchProblem(2, 2, SIGMA_X, SIGMA_Y, "SR", 0.3, restarts=1, max_iters=20))


def test_floor_never_violated_spin_one():
    s = SpinSystem(2)
    for seed in range(3):
        r = minimize_gap(SearchProblem(3, 3, s.jx, s.jy, "SR", 0.25, seed=seed, restarts=2))
        assert r.schmidt_profile.min() >= 0.25 - 1e-10
        assert r.best_gap > 1e-3
