"""JSON formats for matrices, columns, representations, fields and algebras.

Matrices are ``{"dim": m, "re": [[...]], "im": [[...]]}`` (row-major, ``im``
optional). Parse errors raise ``FormatError`` naming the offending field.
"""
import json

import numpy as np

from .columns import OperatorColumn
from .errors import FormatError
from .functions import BendatShermanRep
from .states import AtomicField, BlockTraceAlgebra, State


def matrix_to_json(A):
    A = np.asarray(A, dtype=complex)
    d = {"dim": int(A.shape[0]), "re": A.real.tolist()}
    if np.any(A.imag != 0):
        d["im"] = A.imag.tolist()
    if A.shape[0] != A.shape[1]:
        d["cols"] = int(A.shape[1])
    return d


def _real_grid(value, field, rows, cols):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise FormatError(field, "must be a nested list of numbers") from None
    if arr.shape != (rows, cols):
        raise FormatError(field, f"expected shape ({rows}, {cols}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise FormatError(field, "contains non-finite entries")
    return arr


def matrix_from_json(d, field="matrix"):
    if not isinstance(d, dict):
        raise FormatError(field, "expected an object with dim/re/im")
    if "dim" not in d:
        raise FormatError(f"{field}.dim", "missing")
    if "re" not in d:
        raise FormatError(f"{field}.re", "missing")
    dim = d["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError(f"{field}.dim", f"must be a positive integer, got {dim!r}")
    cols = d.get("cols", dim)
    re = _real_grid(d["re"], f"{field}.re", dim, cols)
    im = _real_grid(d["im"], f"{field}.im", dim, cols) if "im" in d else np.zeros_like(re)
    return re + 1j * im


def column_to_json(col):
    return {"n": col.n, "m": col.m, "blocks": [matrix_to_json(b) for b in col.blocks]}


def column_from_json(d, field="col"):
    if not isinstance(d, dict):
        raise FormatError(field, "expected an object with n/m/blocks")
    for key in ("n", "m", "blocks"):
        if key not in d:
            raise FormatError(f"{field}.{key}", "missing")
    blocks = d["blocks"]
    if not isinstance(blocks, list) or len(blocks) != d["n"]:
        raise FormatError(f"{field}.blocks", f"expected a list of {d['n']} matrices")
    mats = [matrix_from_json(b, f"{field}.blocks[{k}]") for k, b in enumerate(blocks)]
    for k, M in enumerate(mats):
        if M.shape != (d["m"], d["m"]):
            raise FormatError(f"{field}.blocks[{k}]", f"expected {d['m']}x{d['m']}, got {M.shape}")
    return OperatorColumn(np.stack(mats))


def matrices_from_json(d, field="xs"):
    if isinstance(d, dict) and "matrices" in d:
        d = d["matrices"]
    if not isinstance(d, list) or not d:
        raise FormatError(field, "expected a non-empty list of matrices")
    return np.stack([matrix_from_json(x, f"{field}[{k}]") for k, x in enumerate(d)])


def rep_to_json(rep):
    return rep.to_dict()


def rep_from_json(d):
    if not isinstance(d, dict):
        raise FormatError("rep", "expected an object")
    return BendatShermanRep.from_dict(d)


def field_to_json(fld):
    return {"points": [
        {"w": float(w), "a": matrix_to_json(a), "x": matrix_to_json(x)}
        for w, a, x in zip(fld.weights, fld.a, fld.x)
    ]}


def field_from_json(d, field="field"):
    if not isinstance(d, dict) or not isinstance(d.get("points"), list) or not d["points"]:
        raise FormatError(f"{field}.points", "expected a non-empty list")
    ws, as_, xs = [], [], []
    for j, pt in enumerate(d["points"]):
        where = f"{field}.points[{j}]"
        if not isinstance(pt, dict):
            raise FormatError(where, "expected an object with w/a/x")
        for key in ("w", "a", "x"):
            if key not in pt:
                raise FormatError(f"{where}.{key}", "missing")
        try:
            ws.append(float(pt["w"]))
        except (TypeError, ValueError):
            raise FormatError(f"{where}.w", "must be a number") from None
        as_.append(matrix_from_json(pt["a"], f"{where}.a"))
        xs.append(matrix_from_json(pt["x"], f"{where}.x"))
    try:
        return AtomicField(np.array(ws), np.stack(as_), np.stack(xs))
    except ValueError as exc:
        raise FormatError(field, str(exc)) from None


def algebra_to_json(alg):
    return {"blocks": list(alg.blocks), "weights": list(alg.weights)}


def algebra_from_json(d, field="algebra"):
    if not isinstance(d, dict):
        raise FormatError(field, "expected an object with blocks/weights")
    for key in ("blocks", "weights"):
        if key not in d:
            raise FormatError(f"{field}.{key}", "missing")
    try:
        return BlockTraceAlgebra(tuple(d["blocks"]), tuple(d["weights"]))
    except (TypeError, ValueError) as exc:
        raise FormatError(field, str(exc)) from None


def state_from_json(d, field="state"):
    try:
        return State(matrix_from_json(d, field))
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(field, str(exc)) from None


def load_json(path, field):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(field, f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(field, f"invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from None


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)
