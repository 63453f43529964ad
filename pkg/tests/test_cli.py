import csv
import io
import json
import math

import numpy as np
import pytest

from minunc import cli
from minunc.suites import Claim

SX = [[0, 1], [1, 0]]
SY = [[0, [0, -1]], [[0, 1], 0]]
BELL = {"dimA": 2, "dimB": 2, "amplitudes": [[2**-0.5, 0], 0, 0, [2**-0.5, 0]]}
PRODUCT = {"dimA": 2, "dimB": 2, "amplitudes": [1, 0, 0, 0]}


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _csv_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


@pytest.mark.parametrize("suite", ["spin", "oscillator", "epr", "rank", "mixed"])
def test_verify_suites_pass(suite, tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["verify", suite, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] and report["units"] == {"hbar": 1.0, "mass": 1.0, "omega": 1.0}
    assert all(c["passed"] for c in report["claims"])


def test_verify_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setitem(cli.SUITES, "spin", lambda cfg: [Claim("forced", False)])
    monkeypatch.setattr(cli, "run_suite", lambda name, cfg: cli.SUITES[name](cfg))
    assert cli.main(["verify", "spin"]) == 2


def test_verify_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert cli.main(["verify", "spin", "--format", "csv", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# units: hbar=1.00000000000e+00")
    assert all(r["passed"] == "true" for r in _csv_rows(text))


def test_analyze_verdicts(tmp_path, capsys):
    x, y = _write(tmp_path, "x.json", SX), _write(tmp_path, "y.json", SY)
    out = str(tmp_path / "a.json")
    assert cli.main(["analyze", _write(tmp_path, "bell.json", BELL), x, y, "--out", out]) == 0
    assert capsys.readouterr().out.strip() == "NotSaturable"
    assert json.loads(open(out).read())["verdict"] == "NotSaturable"
    assert cli.main(["analyze", _write(tmp_path, "prod.json", PRODUCT), x, y, "--out", out]) == 0
    assert capsys.readouterr().out.strip() == "Saturable"


def test_analyze_model_operators(tmp_path, capsys):
    jx = _write(tmp_path, "jx.json", {"model": {"type": "spin", "j2": 2}, "operator": "Jx"})
    jy = _write(tmp_path, "jy.json", {"model": {"type": "spin", "j2": 2}, "operator": "Jy"})
    state = _write(tmp_path, "s.json", {"dimA": 3, "dimB": 2, "amplitudes": [2**-0.5, 0, 0, 0, 0, 2**-0.5]})
    assert cli.main(["analyze", state, jx, jy, "--mode", "sr"]) == 0
    captured = capsys.readouterr()
    assert captured.err.strip() == "NotSaturable"
    assert json.loads(captured.out)["hurGap"] > 0


def test_analyze_malformed_json(tmp_path, capsys):
    bad = _write(tmp_path, "bad.json", '{"dimA": 2,\n "dimB": }')
    x = _write(tmp_path, "x.json", SX)
    assert cli.main(["analyze", bad, x, x]) == 1
    assert "line 2, column" in capsys.readouterr().err


def test_analyze_missing_file(tmp_path):
    x = _write(tmp_path, "x.json", SX)
    assert cli.main(["analyze", str(tmp_path / "nope.json"), x, x]) == 1


def test_sweep_grid_locates_locus(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--steps", "20", "--grid-points", "128", "--out", str(out)]) == 0
    rows = _csv_rows(out.read_text())
    assert len(rows) == 400
    omega_step = 0.9 / 19
    for sigma in sorted({r["sigma"] for r in rows}):
        mine = [r for r in rows if r["sigma"] == sigma]
        best = min(mine, key=lambda r: float(r["product"]))
        locus = min(max(1 / (4 * float(sigma)), 0.1), 1.0)  # clipped to the scanned range
        assert abs(float(best["omega"]) - locus) <= omega_step
    assert {r["status"] for r in rows} <= {"ok", "grid_too_coarse"}


def test_sweep_single_point(capsys):
    assert cli.main(["sweep", "--steps", "1", "--sigma-range", "1", "1", "--omega-range", "0.25", "0.25"]) == 0
    (row,) = _csv_rows(capsys.readouterr().out)
    assert float(row["product"]) == pytest.approx(0.5, abs=1e-11)
    assert float(row["product_grid"]) == pytest.approx(0.5, rel=1e-4)
    # 12 significant digits in scientific notation
    assert row["product"] == "5.00000000000e-01"


def test_sweep_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--steps", "4", "--grid-points", "64"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_negative_sigma():
    assert cli.main(["sweep", "--sigma-range", "-1", "1"]) == 1


def test_search_presets(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["search", "--preset", "block3", "--rank", "2", "--min-schmidt-coeff", "0.3", "--seed", "2", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["result"]["witness"] and r["recheckMismatch"] < 1e-10
    assert r["problem"]["rank"] == 2


def test_search_problem_file(tmp_path):
    problem = {"dimA": 2, "dimB": 2, "x": SX, "y": SY, "mode": "SR", "minSchmidtCoeff": 0.3, "restarts": 2, "seed": 7}
    out = tmp_path / "r.json"
    assert cli.main(["search", "--problem", _write(tmp_path, "p.json", problem), "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["problem"]["seed"] == 7
    assert r["result"]["bestGap"] == pytest.approx(0.3276, abs=1e-6)


def test_search_bad_problem(tmp_path):
    commuting = {"dimA": 2, "dimB": 2, "x": [[1, 0], [0, -1]], "y": [[1, 0], [0, 1]]}
    assert cli.main(["search", "--problem", _write(tmp_path, "p.json", commuting)]) == 1


def test_bounds_ground_state(tmp_path):
    rho = np.zeros((61, 61))
    rho[0, 0] = 1
    out = tmp_path / "b.json"
    assert cli.main(["bounds", _write(tmp_path, "rho.json", {"model": {"type": "fock"}, "rho": rho.tolist()}), "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["mu"] == pytest.approx(1) and r["betaInfinite"] and r["satisfied"]
    assert r["dmMargin"] == pytest.approx(0, abs=1e-12)


def test_bounds_thermal(tmp_path, capsys):
    g = _write(tmp_path, "g.json", {"model": {"type": "fock", "cutoff": 60}, "gibbs": {"mu": 0.5}})
    assert cli.main(["bounds", g, "--format", "csv"]) == 0
    (row,) = _csv_rows(capsys.readouterr().out)
    assert float(row["phi"]) == pytest.approx((4 + math.sqrt(16 + 9 * 0.25)) / 4.5, abs=1e-10)
    assert row["satisfied"] == "true"


def test_bounds_bare_matrix_exposes_approximate_phi(tmp_path):
    # 0.7|0><0| + 0.3|1><1| has product (1/2 + 0.3)^2 = 0.64, the true minimum
    # at purity 0.58; the approximate Phi overshoots it by ~0.24%
    out = tmp_path / "b.json"
    rho = np.diag([0.7, 0.3, 0.0])
    assert cli.main(["bounds", _write(tmp_path, "rho.json", rho.tolist()), "--out", str(out)]) == 2
    r = json.loads(out.read_text())
    assert r["dmLHS"] == pytest.approx(0.64)
    assert not r["dmSatisfied"] and r["entropicSatisfied"]
    assert -0.01 * r["dmRHS"] < r["dmMargin"] < 0


def test_bounds_non_positive(tmp_path):
    assert cli.main(["bounds", _write(tmp_path, "rho.json", [[1.5, 0], [0, -0.5]])]) == 1


def test_bad_usage_exits_one():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "nonsense"])
    assert exc.value.code == 1


def test_out_directory_missing(tmp_path):
    assert cli.main(["verify", "spin", "--out", str(tmp_path / "no" / "r.json")]) == 1
