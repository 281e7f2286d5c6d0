"""JSON file formats for states, classical joints, decompositions, results.

State files self-describe: a ``matrix`` field (row-major [re, im] pairs)
makes a density matrix, a ``vector`` field a pure state; ``dims`` is always
required.  Parse errors name the offending field.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .classical import ClassicalJoint
from .linalg import PureState, TripartiteState
from .markov import Decomposition
from .optimize import OptResult


class FileFormatError(ValueError):
    pass


def _pairs_to_complex(entries, field: str, expected: int) -> np.ndarray:
    try:
        arr = np.asarray(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"field {field!r}: entries must be [re, im] number pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FileFormatError(f"field {field!r}: expected a list of [re, im] pairs")
    if arr.shape[0] != expected:
        raise FileFormatError(f"field {field!r}: expected {expected} entries, found {arr.shape[0]}")
    return arr[:, 0] + 1j * arr[:, 1]


def _complex_to_pairs(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _read_dims(obj: dict) -> tuple[int, ...]:
    if "dims" not in obj:
        raise FileFormatError("field 'dims' is missing")
    dims = obj["dims"]
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise FileFormatError("field 'dims': expected a list of positive integers")
    return tuple(dims)


def parse_state(obj: Any):
    """Dict -> TripartiteState (3 dims + matrix), (matrix, dims) otherwise, or PureState."""
    if not isinstance(obj, dict):
        raise FileFormatError("top level: expected a JSON object")
    dims = _read_dims(obj)
    side = int(np.prod(dims))
    has_matrix = "matrix" in obj
    has_vector = "vector" in obj
    if has_matrix == has_vector:
        raise FileFormatError("exactly one of the fields 'matrix' or 'vector' is required")
    if has_vector:
        vec = _pairs_to_complex(obj["vector"], "vector", side)
        try:
            return PureState(vec, dims)
        except ValueError as exc:
            raise FileFormatError(f"field 'vector': {exc}") from exc
    mat = _pairs_to_complex(obj["matrix"], "matrix", side * side).reshape(side, side)
    if len(dims) == 3:
        try:
            return TripartiteState(mat, dims)  # type: ignore[arg-type]
        except ValueError as exc:
            raise FileFormatError(f"field 'matrix': {exc}") from exc
    return mat, dims


def load_state(path: str):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_state(obj)


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "vector": _complex_to_pairs(state.vector)}
    if isinstance(state, TripartiteState):
        return {"dims": list(state.dims), "matrix": _complex_to_pairs(state.matrix)}
    mat, dims = state
    return {"dims": list(dims), "matrix": _complex_to_pairs(mat)}


def save_state(path: str, state) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh, sort_keys=True)
        fh.write("\n")


def parse_joint(obj: Any) -> ClassicalJoint:
    if not isinstance(obj, dict):
        raise FileFormatError("top level: expected a JSON object")
    if "shape" not in obj:
        raise FileFormatError("field 'shape' is missing")
    shape = obj["shape"]
    if not isinstance(shape, list) or len(shape) != 3 or not all(isinstance(s, int) and s >= 1 for s in shape):
        raise FileFormatError("field 'shape': expected three positive integers")
    if "table" not in obj:
        raise FileFormatError("field 'table' is missing")
    try:
        table = np.asarray(obj["table"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError("field 'table': entries must be numbers") from exc
    if table.ndim != 1 or table.size != shape[0] * shape[1] * shape[2]:
        raise FileFormatError(
            f"field 'table': expected {shape[0] * shape[1] * shape[2]} flat entries"
        )
    try:
        return ClassicalJoint(table.reshape(shape))
    except ValueError as exc:
        raise FileFormatError(f"field 'table': {exc}") from exc


def load_joint(path: str) -> ClassicalJoint:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_joint(obj)


def joint_to_dict(joint: ClassicalJoint) -> dict:
    return {"shape": list(joint.shape), "table": [float(x) for x in joint.table.reshape(-1)]}


def save_joint(path: str, joint: ClassicalJoint) -> None:
    with open(path, "w") as fh:
        json.dump(joint_to_dict(joint), fh, sort_keys=True)
        fh.write("\n")


def decomposition_to_dict(d: Decomposition) -> dict:
    w = d.isometry
    return {
        "summands": [[l, r] for l, r in d.summands],
        "isometry": {
            "rows": w.shape[0],
            "cols": w.shape[1],
            "entries": _complex_to_pairs(w),
        },
    }


def parse_decomposition(obj: Any) -> Decomposition:
    if not isinstance(obj, dict):
        raise FileFormatError("top level: expected a JSON object")
    if "summands" not in obj:
        raise FileFormatError("field 'summands' is missing")
    try:
        summands = tuple((int(l), int(r)) for l, r in obj["summands"])
    except (TypeError, ValueError) as exc:
        raise FileFormatError("field 'summands': expected [dL, dR] pairs") from exc
    iso = obj.get("isometry")
    if not isinstance(iso, dict) or not {"rows", "cols", "entries"} <= iso.keys():
        raise FileFormatError("field 'isometry': expected keys rows, cols, entries")
    rows, cols = int(iso["rows"]), int(iso["cols"])
    w = _pairs_to_complex(iso["entries"], "isometry.entries", rows * cols).reshape(rows, cols)
    try:
        return Decomposition(summands, w)
    except ValueError as exc:
        raise FileFormatError(f"field 'isometry': {exc}") from exc


def optresult_to_dict(res: OptResult) -> dict:
    return {
        "value": res.value,
        "lower_bound": res.lower_bound,
        "decomposition": None if res.decomposition is None else decomposition_to_dict(res.decomposition),
        "trace": [[rid, val, iters] for rid, val, iters in res.trace],
        "converged": res.converged,
    }


def save_optresult(path: str, res: OptResult) -> None:
    with open(path, "w") as fh:
        json.dump(optresult_to_dict(res), fh, sort_keys=True)
        fh.write("\n")
