"""JSON forms of matrices and reports.

Complex scalars are ``[re, im]`` pairs. Floats use Python's shortest
round-trip representation, so parsing a report gives back the same bits.
Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from .errors import MatrixFileError

NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def _float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    """Recursively convert results into JSON-ready builtins."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(obj.tolist())
        return [to_jsonable(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        if hasattr(obj, "as_dict"):
            out = to_jsonable(obj.as_dict())
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc) -> str:
    """Deterministic text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _reject_constant(name: str):
    raise ValueError(f"non-finite literal {name} is not allowed")


def loads(text: str):
    return json.loads(text, parse_constant=_reject_constant)


def matrix_to_doc(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"dim": int(m.shape[0]), "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m]}


def matrix_from_doc(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise MatrixFileError("expected an object with 'dim' and 'entries'")
    rows = doc["entries"]
    dim = doc.get("dim", len(rows) if isinstance(rows, list) else None)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MatrixFileError(f"'dim' must be a positive integer, got {dim!r}")
    if not isinstance(rows, list) or len(rows) != dim:
        raise MatrixFileError(f"'entries' must have {dim} rows")
    m = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFileError(f"row {i} must have {dim} entries (matrix must be square)")
        for j, z in enumerate(row):
            ok = isinstance(z, list) and len(z) == 2 and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)
            if not ok:
                raise MatrixFileError(f"entry ({i}, {j}) must be a [re, im] pair of numbers")
            if not all(math.isfinite(v) for v in z):
                raise MatrixFileError(f"entry ({i}, {j}) is not finite")
            m[i, j] = complex(z[0], z[1])
    return m


def read_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno} "
                              f"(char {exc.pos}): {exc.msg}") from exc
    except ValueError as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc
    try:
        return matrix_from_doc(doc)
    except MatrixFileError as exc:
        raise MatrixFileError(f"{path}: {exc}") from exc


def write_matrix(path, m: np.ndarray) -> None:
    Path(path).write_text(dumps(matrix_to_doc(m)))


def report_document(seed, tol, results, tool_version: str) -> dict:
    return {"tool_version": tool_version, "seed": seed, "tolerances": tol.as_dict(), "results": results}


def class_report_doc(report) -> dict:
    entries = {}
    for cid, e in report.entries.items():
        entries[cid] = {
            "verdict": e.verdict,
            "margin": e.margin,
            "tol": e.tol,
            "method": e.method,
            "witness": None if e.witness is None else {"vector": e.witness.vector, "violation": e.witness.violation},
            "params": e.params,
            "note": e.note,
        }
    return to_jsonable({"dim": report.dim, "classes": entries})


def verdict_doc(v) -> dict:
    return to_jsonable(v)


def suite_report_doc(report) -> dict:
    theorems = {}
    for tid, t in report.theorems.items():
        offender = None
        if t.offender is not None:
            inst = t.offender["instance"]
            offender = {
                "trial": t.offender["trial"],
                "instance": {k: matrix_to_doc(v) if k != "basis" else np.asarray(v) for k, v in inst.items()},
                "verdict": t.offender["verdict"],
            }
        theorems[tid] = {
            "trials": t.trials,
            "confirmed": t.confirmed,
            "vacuous": t.vacuous,
            "violated": t.violated,
            "premise_hit_rate": t.premise_hit_rate,
            "worst_margin": t.worst_margin,
            "worst_scaled": t.worst_scaled,
            "worst_trial": t.worst_trial,
            "offender": offender,
        }
    return to_jsonable({
        "dims": list(report.dims),
        "trials": report.trials,
        "violated": report.violated,
        "theorems": theorems,
    })
