"""JSON encoding of complex matrices and states.

Complex numbers are two-element ``[re, im]`` arrays (a bare number is read
as real).  Matrices are lists of rows.  Bipartite states are
``{"dimA": n, "dimB": m, "amplitudes": [...]}`` flattened row-major.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .linalg import BipartiteState, DensityMatrix, StateVector


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, bool):
        raise ParseError(f"not a number: {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        return complex(v[0], v[1])
    raise ParseError(f"expected [re, im], got {v!r}")


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def vector_from_json(items) -> np.ndarray:
    if not isinstance(items, list) or not items:
        raise ParseError("expected a non-empty list of amplitudes")
    return np.array([complex_from_json(z) for z in items], dtype=complex)


def matrix_to_json(m) -> list:
    return [[complex_to_json(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("expected a matrix as a list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("matrix rows have different lengths")
    return np.array([[complex_from_json(z) for z in r] for r in rows], dtype=complex)


def state_to_json(psi: StateVector) -> dict:
    return {"dim": psi.dim, "amplitudes": vector_to_json(psi.amplitudes)}


def state_from_json(d) -> StateVector:
    if not isinstance(d, dict) or "amplitudes" not in d:
        raise ParseError("state needs an 'amplitudes' field")
    v = vector_from_json(d["amplitudes"])
    if "dim" in d and int(d["dim"]) != v.size:
        raise ParseError(f"dim {d['dim']} does not match {v.size} amplitudes")
    try:
        return StateVector(v)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def bipartite_to_json(s: BipartiteState) -> dict:
    return {"dimA": s.dim_a, "dimB": s.dim_b, "amplitudes": vector_to_json(s.amplitudes)}


def bipartite_from_json(d) -> BipartiteState:
    if not isinstance(d, dict) or not {"dimA", "dimB", "amplitudes"} <= d.keys():
        raise ParseError("bipartite state needs dimA, dimB and amplitudes")
    v = vector_from_json(d["amplitudes"])
    try:
        return BipartiteState(int(d["dimA"]), int(d["dimB"]), v)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def density_to_json(rho: DensityMatrix) -> list:
    return matrix_to_json(rho.matrix)


def load_json(path) -> object:
    """Read JSON, turning syntax errors into ParseError with line/column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def to_jsonable(obj):
    """Recursively convert numpy / complex values for json.dumps."""
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_json(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
