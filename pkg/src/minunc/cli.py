"""``minunc`` command line: verify, analyze, sweep, search, bounds.

Exit codes: 0 success, 1 usage / input / I-O error, 2 claim failure.
Reports go to --out (or stdout); one-line summaries go to stdout when a
report file is given and to stderr otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import GridTooCoarse, MinUncError, NoProgress
from .linalg import SIGMA_X, SIGMA_Y, BipartiteState, DensityMatrix
from .mixedstate import BETA_PURE, PurityBoundReport, purity_bounds
from .models import EPRGaussian, FockSystem, Grid1D, SpinSystem, epr_moments, gibbs_beta_for_purity, model_from_spec
from .search import SearchProblem, block_witness_observables, minimize_gap, saturation_hunt, verify_result
from .serialize import bipartite_from_json, load_json, matrix_from_json, matrix_to_json, state_from_json, to_jsonable
from .suites import SUITES, SuiteConfig, run_suite
from .uncertainty import saturation_analysis

EXIT_OK, EXIT_USAGE, EXIT_CLAIM = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for claim failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v) -> str:
    """Floats at 12 significant digits, scientific; other values verbatim."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.11e}"
    if v is None:
        return ""
    return str(v)


def _units(args) -> dict:
    return {"hbar": args.hbar, "mass": args.mass, "omega": args.omega}


def _units_line(args) -> str:
    u = _units(args)
    return "# units: " + " ".join(f"{k}={fmt(v)}" for k, v in u.items()) + "\n"


def write_csv(args, fields, rows) -> str:
    buf = io.StringIO()
    buf.write(_units_line(args))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([fmt(r.get(f)) for f in fields])
    return buf.getvalue()


def write_json(args, payload: dict) -> str:
    payload = {"units": _units(args), **payload}
    return json.dumps(to_jsonable(payload), indent=2) + "\n"


def say(args, line: str) -> None:
    """Human summary: stdout when the report goes to a file, else stderr."""
    print(line, file=sys.stdout if args.out else sys.stderr)


def emit(args, text: str) -> None:
    if args.out:
        out = Path(args.out)
        if out.parent and not out.parent.exists():
            raise UsageError(f"output directory {out.parent} does not exist")
        out.write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    cfg = SuiteConfig(
        hbar=args.hbar,
        mass=args.mass,
        omega=args.omega,
        tol=args.tol,
        seed=args.seed or 0,
        grid_points=args.grid_points,
        fock_cutoff=args.fock_cutoff,
    )
    claims = run_suite(args.suite, cfg)
    ok = all(c.passed for c in claims)
    for c in claims:
        say(args, f"{'PASS' if c.passed else 'FAIL'}  {args.suite}: {c.name}")
    if args.format == "csv":
        rows = [{"claim": c.name, "passed": c.passed} for c in claims]
        text = write_csv(args, ["claim", "passed"], rows)
    else:
        text = write_json(args, {"suite": args.suite, "passed": ok, "claims": [c.to_dict() for c in claims]})
    emit(args, text)
    return EXIT_OK if ok else EXIT_CLAIM


# --------------------------------------------------------------------------
# analyze


def _read_state(path) -> BipartiteState:
    d = load_json(path)
    if isinstance(d, dict) and "dimA" in d:
        return bipartite_from_json(d)
    psi = state_from_json(d)
    return BipartiteState(psi.dim, 1, psi.amplitudes)


def _model_operator(d: dict) -> np.ndarray:
    model = model_from_spec(d["model"])
    name = d["operator"]
    if isinstance(model, (SpinSystem, FockSystem)):
        return model.operator(name)
    if isinstance(model, Grid1D):
        if name.lower() in ("x", "q"):
            return model.position_matrix()
        if name.lower() == "p":
            return model.momentum_matrix()
    raise UsageError(f"operator {name!r} not available for model {d['model'].get('type')!r}")


def _read_operator(path) -> np.ndarray:
    d = load_json(path)
    if isinstance(d, dict):
        if "matrix" in d:
            return matrix_from_json(d["matrix"])
        if "model" in d and "operator" in d:
            return _model_operator(d)
        raise UsageError(f"{path}: operator needs 'matrix' or 'model' + 'operator'")
    return matrix_from_json(d)


def cmd_analyze(args) -> int:
    psi = _read_state(args.state)
    x, y = _read_operator(args.x), _read_operator(args.y)
    rep = saturation_analysis(x, y, psi, args.mode, args.tol)
    say(args, rep.verdict.value)
    d = rep.to_dict()
    if args.format == "csv":
        fields = ["index", "coefficient", "annihilation", "meanXMismatch", "meanYMismatch", "varianceRatioMismatch"]
        text = write_csv(args, fields, d["residuals"])
    else:
        text = write_json(args, d)
    emit(args, text)
    return EXIT_OK


# --------------------------------------------------------------------------
# sweep

SWEEP_FIELDS = ["sigma", "omega", "dXA", "dPA", "product", "gap", "dXA_grid", "dPA_grid", "product_grid", "status"]


def _axis(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.array([lo]) if steps == 1 else np.linspace(lo, hi, steps)


def sweep_rows(sigmas, omegas, hbar: float, points: int) -> list[dict]:
    rows = []
    for s in sigmas:
        for o in omegas:
            e = EPRGaussian(float(s), float(o), hbar, points)
            cf = e.closed_form()
            row = {"sigma": s, "omega": o, "dXA": cf.dxa, "dPA": cf.dpa, "product": cf.product, "gap": cf.product - hbar / 2}
            try:
                m = epr_moments(e)
                row.update(dXA_grid=m.dxa_grid, dPA_grid=m.dpa_grid, product_grid=m.product_grid, status="ok")
            except GridTooCoarse:
                row["status"] = "grid_too_coarse"
            rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    (slo, shi), (olo, ohi) = args.sigma_range, args.omega_range
    if min(slo, shi, olo, ohi) <= 0:
        raise UsageError("sigma and Omega ranges must be positive")
    if args.steps < 1:
        raise UsageError("steps must be >= 1")
    rows = sweep_rows(_axis(slo, shi, args.steps), _axis(olo, ohi, args.steps), args.hbar, args.grid_points)
    if args.format == "json":
        text = write_json(args, {"model": "epr", "rows": rows})
    else:
        text = write_csv(args, SWEEP_FIELDS, rows)
    emit(args, text)
    return EXIT_OK


# --------------------------------------------------------------------------
# search

PRESETS = {
    "pauli": lambda: (2, 2, SIGMA_X, SIGMA_Y),
    "block3": lambda: (3, 3, *block_witness_observables()),
}


def _search_problem(args) -> SearchProblem:
    if args.problem:
        d = load_json(args.problem)
        if not isinstance(d, dict):
            raise UsageError("problem file must hold a JSON object")
    else:
        dim_a, dim_b, x, y = PRESETS[args.preset]()
        d = {"dimA": dim_a, "dimB": dim_b, "x": matrix_to_json(x), "y": matrix_to_json(y)}
    overrides = {
        "dimB": args.dim_b,
        "mode": args.mode,
        "minSchmidtCoeff": args.min_schmidt_coeff,
        "restarts": args.restarts,
        "maxIters": args.max_iters,
        "tolerance": args.tolerance,
        "rank": args.rank,
        "seed": args.seed,
    }
    d.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return SearchProblem.from_dict(d)
    except KeyError as exc:
        raise UsageError(f"problem is missing field {exc}") from exc


def cmd_search(args) -> int:
    p = _search_problem(args)
    hunt = p.rank is not None and p.rank < p.dim_a
    r = saturation_hunt(p) if hunt else minimize_gap(p)
    mismatch = verify_result(p, r)
    say(args, f"bestGap {fmt(r.best_gap)}  witness {fmt(r.witness)}  recheck {fmt(mismatch)}")
    payload = {"problem": p.to_dict(), "result": r.to_dict(), "recheckMismatch": mismatch}
    if args.format == "csv":
        rows = [{"restart": i, "bestGap": g} for i, g in enumerate(r.best_by_restart)]
        text = write_csv(args, ["restart", "bestGap"], rows)
    else:
        text = write_json(args, payload)
    emit(args, text)
    return EXIT_OK


# --------------------------------------------------------------------------
# bounds


def _bounds_input(args) -> tuple[DensityMatrix, np.ndarray, np.ndarray]:
    d = load_json(args.rho)
    spec = {"type": "fock", "cutoff": args.fock_cutoff, "mass": args.mass, "omega": args.omega, "hbar": args.hbar}
    if isinstance(d, list):
        rho = matrix_from_json(d)
        spec["cutoff"] = rho.shape[0] - 1
    elif isinstance(d, dict):
        spec.update(d.get("model", {}))
        spec.setdefault("hbar", args.hbar)
        model = model_from_spec(spec)
        if "rho" in d:
            rho = matrix_from_json(d["rho"])
        elif "gibbs" in d and isinstance(model, FockSystem):
            g = d["gibbs"]
            beta = gibbs_beta_for_purity(float(g["mu"])) if "mu" in g else float(g["beta"])
            return model.gibbs(beta), model.x, model.p
        else:
            raise UsageError("bounds input needs 'rho' (or 'gibbs' for a Fock model)")
    else:
        raise UsageError("bounds input must be a matrix or an object")
    model = model_from_spec(spec)
    if isinstance(model, FockSystem):
        q, p = model.x, model.p
    elif isinstance(model, Grid1D):
        q, p = model.position_matrix(), model.momentum_matrix()
    else:
        raise UsageError("bounds needs a fock or grid model")
    if q.shape != rho.shape:
        raise UsageError(f"rho is {rho.shape[0]}x{rho.shape[1]} but the model has dimension {q.shape[0]}")
    return DensityMatrix(rho), q, p


def cmd_bounds(args) -> int:
    rho, q, p = _bounds_input(args)
    rep = purity_bounds(rho, q, p, args.hbar, args.tol)
    say(args, f"mu {fmt(rep.mu)}  satisfied {fmt(rep.satisfied)}")
    if args.format == "csv":
        row = rep.to_row()
        row["beta"] = "inf" if rep.beta == BETA_PURE else rep.beta
        text = write_csv(args, list(PurityBoundReport.ROW_FIELDS), [row])
    else:
        text = write_json(args, rep.to_dict())
    emit(args, text)
    return EXIT_OK if rep.satisfied else EXIT_CLAIM


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0; a problem file's seed wins unless this is given)")
    common.add_argument("--hbar", type=float, default=1.0)
    common.add_argument("--mass", type=float, default=1.0)
    common.add_argument("--omega", type=float, default=1.0, help="oscillator frequency")
    common.add_argument("--grid-points", type=int, default=512)
    common.add_argument("--fock-cutoff", type=int, default=60)

    parser = _Parser(prog="minunc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run a claim suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.set_defaults(func=cmd_verify, default_format="json")

    a = sub.add_parser("analyze", parents=[common], help="saturation analysis of a bipartite state")
    a.add_argument("state")
    a.add_argument("x")
    a.add_argument("y")
    a.add_argument("--mode", choices=["HUR", "SR"], default="HUR", type=str.upper)
    a.set_defaults(func=cmd_analyze, default_format="json")

    s = sub.add_parser("sweep", parents=[common], help="EPR Gaussian (sigma, Omega) sweep")
    s.add_argument("--model", choices=["epr"], default="epr")
    s.add_argument("--sigma-range", type=float, nargs=2, default=[0.5, 2.0], metavar=("LO", "HI"))
    s.add_argument("--omega-range", type=float, nargs=2, default=[0.1, 1.0], metavar=("LO", "HI"))
    s.add_argument("--steps", type=int, default=20)
    s.set_defaults(func=cmd_sweep, default_format="csv")

    r = sub.add_parser("search", parents=[common], help="minimise the uncertainty gap")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--problem", help="SearchProblem JSON")
    src.add_argument("--preset", choices=sorted(PRESETS), default="pauli")
    r.add_argument("--dim-b", type=int)
    r.add_argument("--mode", choices=["HUR", "SR"], type=str.upper)
    r.add_argument("--min-schmidt-coeff", type=float)
    r.add_argument("--restarts", type=int)
    r.add_argument("--max-iters", type=int)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--rank", type=int)
    r.set_defaults(func=cmd_search, default_format="json")

    b = sub.add_parser("bounds", parents=[common], help="purity and entropy bounds for a density matrix")
    b.add_argument("rho")
    b.set_defaults(func=cmd_bounds, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = args.format or args.default_format
    try:
        return args.func(args)
    except NoProgress as exc:
        print(f"minunc: {exc}", file=sys.stderr)
        return EXIT_CLAIM
    except (MinUncError, UsageError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"minunc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
