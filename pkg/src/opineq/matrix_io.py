"""Shared matrix JSON format: ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` (row-major)."""
import json
import math

import numpy as np

from .errors import DomainError, ShapeError


def matrix_to_json(X):
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2:
        raise ShapeError("matrix_to_json expects a 2-d array")
    return {
        "rows": int(X.shape[0]),
        "cols": int(X.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in X.ravel()],
    }


def matrix_from_json(obj):
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"malformed matrix JSON: {exc}") from None
    if rows < 1 or cols < 1:
        raise ShapeError("rows and cols must be positive")
    if len(data) != rows * cols:
        raise ShapeError(f"expected {rows * cols} entries, got {len(data)}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, entry in enumerate(data):
        if isinstance(entry, (int, float)):
            re, im = float(entry), 0.0
        else:
            if len(entry) != 2:
                raise ShapeError(f"entry {i} is not a [re, im] pair")
            re, im = float(entry[0]), float(entry[1])
        if not (math.isfinite(re) and math.isfinite(im)):
            raise DomainError(f"non-finite value at entry {i}")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)


def _reject_constant(name):
    raise DomainError(f"non-finite literal {name} in matrix JSON")


def loads_matrix(text):
    return matrix_from_json(json.loads(text, parse_constant=_reject_constant))


def dumps_matrix(X):
    return json.dumps(matrix_to_json(X))


def load_matrix(path):
    with open(path) as fh:
        return loads_matrix(fh.read())
