"""Matrix files and JSON certificates.

A matrix file is either a JSON object ``{"rows": r, "cols": c, "data": [[...]]}``
or plain text with one whitespace-separated row per line.  Only the JSON
form can express zero-sized matrices.  Floats are written with Python's
shortest round-trip repr, so parse -> write -> parse is bit exact.
"""

import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import NspkitError

__all__ = [
    "MatrixFileError",
    "parse_matrix",
    "read_matrix",
    "read_vector",
    "matrix_to_obj",
    "matrix_from_obj",
    "format_matrix",
    "write_matrix",
    "make_certificate",
    "dump_json",
    "read_json",
]


class MatrixFileError(NspkitError, ValueError):
    pass


def matrix_to_obj(A):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "data": [[float(x) for x in row] for row in A],
    }


def matrix_from_obj(obj, source="<json>"):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(f"{source}: expected keys rows, cols, data") from exc
    if rows < 0 or cols < 0:
        raise MatrixFileError(f"{source}: negative dimension")
    if rows == 0 or cols == 0:
        if any(len(r) for r in data):
            raise MatrixFileError(f"{source}: data given for an empty matrix")
        return np.zeros((rows, cols))
    if len(data) != rows or any(len(r) != cols for r in data):
        raise MatrixFileError(f"{source}: data does not match {rows}x{cols}")
    try:
        A = np.array([[float(x) for x in r] for r in data], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(f"{source}: non-numeric entry") from exc
    if not np.all(np.isfinite(A)):
        raise MatrixFileError(f"{source}: non-finite entry")
    return A


def parse_matrix(text, source="<string>"):
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MatrixFileError(f"{source}: invalid JSON ({exc.msg})") from exc
        return matrix_from_obj(obj, source)
    rows = []
    for lineno, line in enumerate(stripped.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise MatrixFileError(f"{source}:{lineno}: non-numeric entry") from exc
    if not rows:
        raise MatrixFileError(f"{source}: no data")
    if len({len(r) for r in rows}) != 1:
        raise MatrixFileError(f"{source}: ragged rows")
    A = np.array(rows, dtype=float)
    if not np.all(np.isfinite(A)):
        raise MatrixFileError(f"{source}: non-finite entry")
    return A


def read_matrix(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MatrixFileError(f"{path}: {exc.strerror}") from exc
    return parse_matrix(text, str(path))


def read_vector(path):
    A = read_matrix(path)
    if A.size and 1 not in A.shape:
        raise MatrixFileError(f"{path}: expected a vector, got shape {A.shape}")
    return A.ravel()


def format_matrix(A, fmt="json"):
    A = np.asarray(A, dtype=float)
    if fmt == "json":
        return json.dumps(matrix_to_obj(A)) + "\n"
    if A.size == 0:
        raise MatrixFileError("empty matrices need the JSON format")
    return "".join(" ".join(repr(float(x)) for x in row) + "\n" for row in A)


def write_matrix(path, A, fmt="json"):
    Path(path).write_text(format_matrix(A, fmt))


def _clean(value):
    """Recursively make a value strict-JSON safe (no NaN/Inf, no numpy types)."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return matrix_to_obj(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def make_certificate(kind, problem, verdict, witness, diagnostics, tol):
    """Assemble a certificate document; ``problem`` maps names to inputs."""
    return _clean(
        {
            "kind": kind,
            "problem": problem,
            "verdict": verdict,
            "witness": None if witness is None else witness,
            "diagnostics": diagnostics,
            "tolerances": tol.to_dict(),
            "tool_version": f"nspkit {__version__}",
        }
    )


def dump_json(obj):
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise MatrixFileError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path}: invalid JSON ({exc.msg})") from exc
