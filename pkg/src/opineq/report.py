"""Check reports and witness certificates, plus their JSON/CSV projections."""
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .tolerance import DEFAULT_TOL, ToleranceConfig

WITNESS_KINDS = ("unitary", "partial_isometry", "contraction", "pair")

# invariant slack for each certificate kind
WITNESS_SLACK = 1e-9


@dataclass
class WitnessCertificate:
    """A constructed matrix whose existence an inequality asserts.

    ``residual`` is the gap of the inequality the witness certifies (negative
    means the certified inequality failed); ``invariant_residual`` measures how
    far the matrix is from its kind (unitary, partial isometry, contraction).
    """

    kind: str
    matrices: tuple
    residual: float
    invariant_residual: float = 0.0

    def __post_init__(self):
        if self.kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.kind!r}")
        self.matrices = tuple(np.asarray(m, dtype=complex) for m in self.matrices)
        if not self.invariant_residual:
            self.invariant_residual = self.measure_invariant()

    @property
    def matrix(self):
        return self.matrices[0]

    def measure_invariant(self):
        if self.kind == "pair":
            # (U, K): a unitary followed by a contraction
            return max(_kind_residual("unitary", self.matrices[0]), _kind_residual("contraction", self.matrices[1]))
        return max(_kind_residual(self.kind, m) for m in self.matrices)

    def kind_ok(self, slack=WITNESS_SLACK):
        return self.measure_invariant() <= slack

    def to_dict(self, include_matrices=False):
        out = {
            "kind": self.kind,
            "residual": float(self.residual),
            "invariant_residual": float(self.invariant_residual),
        }
        if include_matrices:
            from .matrix_io import matrix_to_json

            out["matrices"] = [matrix_to_json(m) for m in self.matrices]
        return out


def _kind_residual(kind, m):
    n = m.shape[1]
    if kind == "unitary":
        return float(np.max(np.abs(m.conj().T @ m - np.eye(n))))
    if kind == "partial_isometry":
        return float(np.max(np.abs(m @ m.conj().T @ m - m), initial=0.0))
    if kind == "contraction":
        from .linalg import singular_values_desc

        return max(0.0, float(singular_values_desc(m)[0]) - 1.0)
    raise ValueError(kind)


@dataclass
class InequalityCheckReport:
    case_id: str
    holds: bool
    gap: float
    witness: Optional[WitnessCertificate] = None
    digest: dict = field(default_factory=dict)
    tolerances: ToleranceConfig = DEFAULT_TOL
    details: dict = field(default_factory=dict)
    asserted: bool = True

    def to_dict(self, include_matrices=False):
        return {
            "case_id": self.case_id,
            "holds": bool(self.holds),
            "asserted": bool(self.asserted),
            "gap": _clean(self.gap),
            "witness": None if self.witness is None else self.witness.to_dict(include_matrices),
            "digest": _clean(self.digest),
            "tolerances": self.tolerances.as_dict(),
            "details": _clean(self.details),
        }


def _clean(obj):
    """Coerce numpy scalars/arrays into JSON-ready python values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return None
        return x
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def spec_hash(obj):
    """Short stable hash of a JSON-able object (used for map specs in digests)."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def report_schema():
    text = resources.files("opineq").joinpath("report_schema.json").read_text()
    return json.loads(text)


CSV_FIELDS = ("case_id", "holds", "asserted", "gap", "witness_kind", "witness_residual", "seed", "trial", "dim")


def report_csv_row(record):
    """Lossy flat projection of a serialized report record."""
    w = record.get("witness") or {}
    d = record.get("digest") or {}
    return [
        record["case_id"],
        int(record["holds"]),
        int(record["asserted"]),
        record["gap"],
        w.get("kind", ""),
        w.get("residual", ""),
        d.get("seed", ""),
        d.get("trial", ""),
        d.get("dim", ""),
    ]
