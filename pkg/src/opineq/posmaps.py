"""Positive linear maps between matrix algebras, as symbolic specs.

Each map applies with its natural structure (compression ``V* X V``, Schur
product, block pinching...).  A dense superoperator only appears inside
:func:`choi_matrix`.
"""
import enum
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError
from .linalg import as_hermitian, eig_hermitian, eigenvalues_desc, hermitize, is_projection, loewner_leq, matrix_function
from .matrix_io import matrix_from_json, matrix_to_json
from .report import spec_hash
from .tolerance import DEFAULT_TOL, ToleranceConfig

PROJECTION_ATOL = 1e-10
CONTRACTION_SLACK = 1e-10

# Schur symbol of the three-by-three counterexample to dropping the unitary
COUNTEREXAMPLE_SYMBOL = np.array([[1.0, 1.0, 0.5], [1.0, 1.0, 0.5], [0.5, 0.5, 1.0]], dtype=np.complex128)


def perturbed_diagonal(eps):
    """``diag(1, 2, 3) + eps * ones`` -- the perturbed diagonal used with :data:`COUNTEREXAMPLE_SYMBOL`."""
    return np.diag([1.0, 2.0, 3.0]).astype(np.complex128) + eps * np.ones((3, 3))


class Unitality(str, enum.Enum):
    UNITAL = "unital"
    SUBUNITAL = "subunital"
    NEITHER = "neither"


class PositiveMap:
    """Base class; subclasses implement ``_apply`` on square ``in_dim`` matrices."""

    kind = "abstract"
    in_dim: int
    out_dim: int

    def _apply(self, X):
        raise NotImplementedError

    def __call__(self, X):
        X = np.asarray(X, dtype=np.complex128)
        if X.shape != (self.in_dim, self.in_dim):
            raise ShapeError(f"{self.kind} map expects {self.in_dim}x{self.in_dim}, got {X.shape}")
        return self._apply(X)

    def params_json(self):
        raise NotImplementedError

    def to_json(self):
        return {"kind": self.kind, "params": self.params_json()}

    def digest(self):
        return spec_hash(self.to_json())


@dataclass
class Compression(PositiveMap):
    """``X -> V* X V`` where the columns of ``V`` span the range of the projection ``E``."""

    E: np.ndarray
    V: np.ndarray = field(init=False, repr=False)
    kind = "compression"

    def __post_init__(self):
        self.E = hermitize(self.E)
        if not is_projection(self.E, PROJECTION_ATOL):
            raise PreconditionError("compression needs an orthogonal projection (E^2 = E = E*)")
        ed = eig_hermitian(self.E)
        self.V = ed.vectors[:, ed.values > 0.5]
        if self.V.shape[1] == 0:
            raise PreconditionError("compression onto the zero subspace")

    @property
    def in_dim(self):
        return self.E.shape[0]

    @property
    def out_dim(self):
        return self.V.shape[1]

    def _apply(self, X):
        return self.V.conj().T @ X @ self.V

    def params_json(self):
        return {"E": matrix_to_json(self.E)}


@dataclass
class Congruence(PositiveMap):
    """``X -> Z* X Z``; sub-unital exactly when ``||Z|| <= 1``."""

    Z: np.ndarray
    sub_unital: bool = False
    kind = "congruence"

    def __post_init__(self):
        self.Z = np.asarray(self.Z, dtype=np.complex128)
        if self.sub_unital:
            from .linalg import singular_values_desc

            if singular_values_desc(self.Z)[0] > 1.0 + CONTRACTION_SLACK:
                raise PreconditionError("sub-unital congruence needs a contraction")

    @property
    def in_dim(self):
        return self.Z.shape[0]

    @property
    def out_dim(self):
        return self.Z.shape[1]

    def _apply(self, X):
        return self.Z.conj().T @ X @ self.Z

    def params_json(self):
        return {"Z": matrix_to_json(self.Z), "sub_unital": self.sub_unital}


@dataclass
class SchurMultiplier(PositiveMap):
    """Entrywise product ``X -> B o X`` with a PSD symbol ``B``."""

    B: np.ndarray
    kind = "schur"

    def __post_init__(self):
        self.B = hermitize(self.B)
        w = eigenvalues_desc(self.B)
        if w[-1] < -DEFAULT_TOL.tau_psd * max(1.0, abs(w[0])):
            raise PreconditionError("Schur symbol must be positive semidefinite")

    @property
    def in_dim(self):
        return self.B.shape[0]

    @property
    def out_dim(self):
        return self.B.shape[0]

    def _apply(self, X):
        return self.B * X

    def params_json(self):
        return {"B": matrix_to_json(self.B)}


@dataclass
class Pinching(PositiveMap):
    """Keeps the diagonal blocks indexed by ``blocks`` (a partition of ``range(dim)``)."""

    dim: int
    blocks: Tuple[Tuple[int, ...], ...]
    mask: np.ndarray = field(init=False, repr=False)
    kind = "pinching"

    def __post_init__(self):
        self.blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        flat = sorted(i for b in self.blocks for i in b)
        if flat != list(range(self.dim)) or any(len(b) == 0 for b in self.blocks):
            raise PreconditionError("pinching blocks must partition the basis indices")
        self.mask = np.zeros((self.dim, self.dim))
        for b in self.blocks:
            self.mask[np.ix_(b, b)] = 1.0

    @property
    def in_dim(self):
        return self.dim

    @property
    def out_dim(self):
        return self.dim

    def _apply(self, X):
        return self.mask * X

    def params_json(self):
        return {"dim": self.dim, "blocks": [list(b) for b in self.blocks]}


@dataclass
class TraceState(PositiveMap):
    """``X -> tr(rho X)`` as a 1x1 matrix, ``rho`` a density matrix."""

    density: np.ndarray
    kind = "trace_state"

    def __post_init__(self):
        self.density = hermitize(self.density)
        if abs(np.trace(self.density).real - 1.0) > 1e-10:
            raise PreconditionError("density must have unit trace")

    @property
    def in_dim(self):
        return self.density.shape[0]

    @property
    def out_dim(self):
        return 1

    def _apply(self, X):
        return np.array([[np.sum(self.density.T * X)]], dtype=np.complex128)

    def params_json(self):
        return {"density": matrix_to_json(self.density)}


@dataclass
class Transpose(PositiveMap):
    """Transpose map: positive but not completely positive (negative control)."""

    dim: int
    kind = "transpose"

    @property
    def in_dim(self):
        return self.dim

    @property
    def out_dim(self):
        return self.dim

    def _apply(self, X):
        return X.T.copy()

    def params_json(self):
        return {"dim": self.dim}


@dataclass
class Mixture(PositiveMap):
    weights: Sequence[float]
    parts: Sequence[PositiveMap]
    kind = "mixture"

    def __post_init__(self):
        self.weights = tuple(float(w) for w in self.weights)
        self.parts = tuple(self.parts)
        if len(self.weights) != len(self.parts) or not self.parts:
            raise PreconditionError("mixture needs one weight per part")
        if any(w < 0 for w in self.weights) or sum(self.weights) > 1.0 + 1e-12:
            raise PreconditionError("mixture weights must be non-negative with sum <= 1")
        dims = {(p.in_dim, p.out_dim) for p in self.parts}
        if len(dims) != 1:
            raise ShapeError("mixture parts must share dimensions")

    @property
    def in_dim(self):
        return self.parts[0].in_dim

    @property
    def out_dim(self):
        return self.parts[0].out_dim

    def _apply(self, X):
        return sum(w * p(X) for w, p in zip(self.weights, self.parts))

    def params_json(self):
        return {"weights": list(self.weights), "parts": [p.to_json() for p in self.parts]}


@dataclass
class Compose(PositiveMap):
    """``X -> outer(inner(X))``."""

    outer: PositiveMap
    inner: PositiveMap
    kind = "compose"

    def __post_init__(self):
        if self.inner.out_dim != self.outer.in_dim:
            raise ShapeError("composition dimension mismatch")

    @property
    def in_dim(self):
        return self.inner.in_dim

    @property
    def out_dim(self):
        return self.outer.out_dim

    def _apply(self, X):
        return self.outer(self.inner(X))

    def params_json(self):
        return {"outer": self.outer.to_json(), "inner": self.inner.to_json()}


def identity_map(n):
    return Compression(np.eye(n, dtype=np.complex128))


def apply_map(phi: PositiveMap, X):
    """Apply ``phi`` to a Hermitian matrix; the result is returned in canonical Hermitian form."""
    return hermitize(phi(as_hermitian(X)))


def classify_unitality(phi: PositiveMap, tol: ToleranceConfig = DEFAULT_TOL) -> Unitality:
    img = hermitize(phi(np.eye(phi.in_dim, dtype=np.complex128)))
    eye = np.eye(phi.out_dim)
    if np.max(np.abs(img - eye)) <= tol.tau_id:
        return Unitality.UNITAL
    if loewner_leq(img, eye, tol).holds:
        return Unitality.SUBUNITAL
    return Unitality.NEITHER


def choi_matrix(phi: PositiveMap):
    """``sum_ij E_ij (x) phi(E_ij)`` of size ``in_dim * out_dim``."""
    n, m = phi.in_dim, phi.out_dim
    C = np.zeros((n * m, n * m), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            Eij = np.zeros((n, n), dtype=np.complex128)
            Eij[i, j] = 1.0
            C[i * m:(i + 1) * m, j * m:(j + 1) * m] = phi(Eij)
    return hermitize(C)


def is_completely_positive(phi: PositiveMap, tol: ToleranceConfig = DEFAULT_TOL):
    w = eigenvalues_desc(choi_matrix(phi), tol)
    return bool(w[-1] >= -tol.tau_psd * max(1.0, abs(w[0])))


def dilation_projection(Z, tol: ToleranceConfig = DEFAULT_TOL):
    """The ``2n x 2n`` projection ``[[Z, S], [S, I - Z]]`` with ``S = (Z(I - Z))^{1/2}``."""
    Z = as_hermitian(Z)
    w = eigenvalues_desc(Z, tol)
    if w[-1] < -tol.tau_psd or w[0] > 1.0 + tol.tau_psd:
        raise PreconditionError(f"Z is not a positive contraction (spectrum [{w[-1]:.3g}, {w[0]:.3g}])")
    n = Z.shape[0]
    try:
        S = matrix_function(Z, lambda t: np.sqrt(t * (1.0 - t)), (0.0, 1.0), tol)
    except DomainError as exc:
        raise PreconditionError(str(exc)) from None
    I = np.eye(n)
    E = np.block([[Z, S], [S, I - Z]])
    return hermitize(E)


# ---------------------------------------------------------------------------
# random generation
# ---------------------------------------------------------------------------

MAP_KINDS = ("compression", "schur", "pinching", "congruence", "mixture", "trace_state", "transpose")


def random_unit_diagonal_psd(n, rng):
    G = rng.complex_normal((n + 1, n))
    B = G.conj().T @ G
    d = 1.0 / np.sqrt(np.diag(B).real)
    B = B * np.outer(d, d)
    np.fill_diagonal(B, 1.0)
    return hermitize(B)


def random_partition(n, rng):
    perm = [int(i) for i in np.argsort(rng.uniform(n), kind="stable")]
    nblocks = rng.integer(1, n + 1)
    cut_order = np.argsort(rng.uniform(max(n - 1, 1)), kind="stable")[: nblocks - 1] + 1
    bounds = [0] + sorted(int(c) for c in cut_order) + [n]
    return tuple(tuple(sorted(perm[a:b])) for a, b in zip(bounds[:-1], bounds[1:]))


def random_map(kind, in_dim, out_dim, rng):
    """Random map of the requested kind (deterministic in ``rng``)."""
    from .rng import random_contraction, random_projection, random_psd

    if kind == "compression":
        return Compression(random_projection(in_dim, out_dim, rng))
    if kind == "schur":
        return SchurMultiplier(random_unit_diagonal_psd(in_dim, rng))
    if kind == "pinching":
        return Pinching(in_dim, random_partition(in_dim, rng))
    if kind == "congruence":
        return Congruence(random_contraction(in_dim, rng), sub_unital=True)
    if kind == "mixture":
        k = rng.integer(2, 4)
        parts = [random_map(rng.choice(("schur", "pinching")), in_dim, in_dim, rng) for _ in range(k)]
        w = rng.uniform_range(0.1, 1.0, k)
        return Mixture(tuple(w / w.sum()), parts)
    if kind == "trace_state":
        rho = random_psd(in_dim, rng, 0.0, 1.0)
        return TraceState(rho / np.trace(rho).real)
    if kind == "transpose":
        return Transpose(in_dim)
    raise ValueError(f"unknown map kind {kind!r}")


def map_from_json(obj):
    kind = obj["kind"]
    p = obj.get("params", {})
    if kind == "compression":
        return Compression(matrix_from_json(p["E"]))
    if kind == "congruence":
        return Congruence(matrix_from_json(p["Z"]), bool(p.get("sub_unital", False)))
    if kind == "schur":
        return SchurMultiplier(matrix_from_json(p["B"]))
    if kind == "pinching":
        return Pinching(int(p["dim"]), p["blocks"])
    if kind == "trace_state":
        return TraceState(matrix_from_json(p["density"]))
    if kind == "transpose":
        return Transpose(int(p["dim"]))
    if kind == "mixture":
        return Mixture(p["weights"], [map_from_json(q) for q in p["parts"]])
    if kind == "compose":
        return Compose(map_from_json(p["outer"]), map_from_json(p["inner"]))
    raise ValueError(f"unknown map kind {kind!r}")


def counterexample_map():
    return SchurMultiplier(COUNTEREXAMPLE_SYMBOL)
