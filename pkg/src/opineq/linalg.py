"""Dense complex-matrix kernel.

Matrices are plain ``complex128`` numpy arrays.  Hermitian inputs are
symmetrized as ``(H + H*)/2`` before use; everything spectral goes through the
cyclic Jacobi eigensolver in :mod:`opineq._accel`.
"""
from typing import NamedTuple

import numpy as np

from . import _accel
from .errors import DomainError, DominanceError, NumericFailure, ShapeError, SingularError
from .report import WitnessCertificate
from .tolerance import DEFAULT_TOL, ToleranceConfig

MAX_SWEEPS = 60
HERMITIAN_RTOL = 1e-12
STRICT_POSITIVITY = 1e-10


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


class LoewnerResult(NamedTuple):
    holds: bool
    gap: float
    scale: float


class SVD(NamedTuple):
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray
    rank: int


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def as_matrix(X, square=True):
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {X.shape}")
    if square and X.shape[0] != X.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {X.shape}")
    if X.size == 0:
        raise ShapeError("empty matrix")
    if not np.all(np.isfinite(X)):
        raise DomainError("matrix has non-finite entries")
    return X


def hermitize(H):
    H = np.asarray(H, dtype=np.complex128)
    return 0.5 * (H + H.conj().T)


def as_hermitian(H):
    """Validate ``H`` as Hermitian and return its canonical ``(H + H*)/2`` form."""
    H = as_matrix(H)
    asym = np.linalg.norm(H - H.conj().T)
    if asym > HERMITIAN_RTOL * max(1.0, np.linalg.norm(H)):
        raise DomainError(f"matrix is not Hermitian (||H - H*||_F = {asym:.3g})")
    return hermitize(H)


def as_psd(A, tol: ToleranceConfig = DEFAULT_TOL):
    """Validate ``A`` as positive semidefinite; tiny negative eigenvalues are clamped to 0."""
    A = as_hermitian(A)
    ed = eig_hermitian(A, tol)
    scale = max(1.0, float(np.max(np.abs(ed.values))))
    lo = ed.values[-1]
    if lo < -tol.tau_psd * scale:
        raise DomainError(f"matrix is not positive semidefinite (smallest eigenvalue {lo:.3g})")
    if lo < 0.0:
        return hermitize((ed.vectors * np.maximum(ed.values, 0.0)) @ ed.vectors.conj().T)
    return A


def is_projection(E, atol=1e-10):
    E = np.asarray(E, dtype=np.complex128)
    return bool(
        np.max(np.abs(E - E.conj().T)) <= atol and np.max(np.abs(E @ E - E)) <= atol
    )


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def eig_hermitian(H, tol: ToleranceConfig = DEFAULT_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Eigenvalues come back in non-increasing order; the sort is stable so tied
    eigenvalues keep their Jacobi ordering.
    """
    H = as_hermitian(H)
    w, v, _sweeps, converged = _accel.jacobi_sweeps(H, tol.tau_eig, MAX_SWEEPS)
    if not converged:
        raise NumericFailure(f"Jacobi did not converge within {MAX_SWEEPS} sweeps")
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigenvalues_desc(H, tol: ToleranceConfig = DEFAULT_TOL):
    return eig_hermitian(H, tol).values


def psd_product_eigenvalues(P, Q, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigenvalues of the product of two PSD matrices, via ``P^{1/2} Q P^{1/2}``."""
    r = frac_power(P, 0.5, tol)
    return eigenvalues_desc(r @ Q @ r, tol)


def opnorm(X, tol: ToleranceConfig = DEFAULT_TOL):
    """Operator norm (largest singular value)."""
    X = np.asarray(X, dtype=np.complex128)
    if X.shape[0] == X.shape[1] and np.array_equal(X, X.conj().T):
        return float(np.max(np.abs(eigenvalues_desc(X, tol))))
    return float(singular_values_desc(X, tol)[0])


def _complete_orthonormal(cols, n):
    """Extend orthonormal columns to an ``n x n`` unitary by modified Gram-Schmidt."""
    basis = [c for c in cols.T] if cols.size else []
    while len(basis) < n:
        Q = np.array(basis).T if basis else np.zeros((n, 0), dtype=np.complex128)
        # pick the coordinate direction least covered by the current columns
        resid = 1.0 - np.sum(np.abs(Q) ** 2, axis=1)
        k = int(np.argmax(resid))
        x = np.zeros(n, dtype=np.complex128)
        x[k] = 1.0
        for _ in range(2):
            for b in basis:
                x = x - (b.conj() @ x) * b
        basis.append(x / np.linalg.norm(x))
    return np.array(basis).T


def svd(X, tol: ToleranceConfig = DEFAULT_TOL) -> SVD:
    """Full SVD of a square matrix built from the eigendecomposition of ``X*X``.

    Singular values are taken as ``||X v_j||`` (more accurate for small values
    than square roots of eigenvalues); left vectors of the numerical null space
    are completed by Gram-Schmidt.
    """
    X = as_matrix(X)
    n = X.shape[0]
    ed = eig_hermitian(X.conj().T @ X, tol)
    V = ed.vectors
    XV = X @ V
    s = np.linalg.norm(XV, axis=0)
    order = np.argsort(-s, kind="stable")
    s, V, XV = s[order], V[:, order], XV[:, order]
    cutoff = 64 * np.finfo(float).eps * n * max(s[0], np.finfo(float).tiny)
    cols = []
    for j in range(n):
        if s[j] <= cutoff:
            break
        u = XV[:, j] / s[j]
        for _ in range(2):
            for b in cols:
                u = u - (b.conj() @ u) * b
        nu = np.linalg.norm(u)
        if nu < 0.5:
            break
        cols.append(u / nu)
    rank = len(cols)
    Ur = np.array(cols).T if cols else np.zeros((n, 0), dtype=np.complex128)
    U = _complete_orthonormal(Ur, n)
    return SVD(U, s, V, rank)


def singular_values_desc(X, tol: ToleranceConfig = DEFAULT_TOL):
    X = np.asarray(X, dtype=np.complex128)
    if X.shape[0] != X.shape[1]:
        # pad to square: singular values are unchanged up to trailing zeros
        m = max(X.shape)
        Y = np.zeros((m, m), dtype=np.complex128)
        Y[: X.shape[0], : X.shape[1]] = X
        return svd(Y, tol).s[: min(X.shape)]
    return svd(X, tol).s


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------

def matrix_function(H, f, domain=(-np.inf, np.inf), tol: ToleranceConfig = DEFAULT_TOL):
    """Apply a scalar function ``f`` to Hermitian ``H`` through its spectrum.

    Eigenvalues within ``tau_psd`` (relative) of the domain are clamped onto it;
    anything further out raises :class:`DomainError`.
    """
    ed = eig_hermitian(H, tol)
    lo, hi = domain
    w = ed.values
    slack = tol.tau_psd * max(1.0, float(np.max(np.abs(w))))
    if w[-1] < lo - slack or w[0] > hi + slack:
        raise DomainError(f"spectrum [{w[-1]:.6g}, {w[0]:.6g}] outside domain [{lo}, {hi}]")
    w = np.clip(w, lo, hi)
    fw = np.asarray(f(w), dtype=float)
    return hermitize((ed.vectors * fw) @ ed.vectors.conj().T)


def frac_power(P, t, tol: ToleranceConfig = DEFAULT_TOL):
    """Spectral power ``P^t`` of a PSD matrix (``P^0 = I``)."""
    t = float(t)
    ed = eig_hermitian(P, tol)
    w = ed.values
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[-1] < -tol.tau_psd * scale:
        raise DomainError(f"fractional power of a non-PSD matrix (smallest eigenvalue {w[-1]:.3g})")
    w = np.maximum(w, 0.0)
    if t == 0.0:
        return np.eye(len(w), dtype=np.complex128)
    if t < 0.0 and w[-1] <= STRICT_POSITIVITY * float(np.max(w)):
        raise SingularError("negative power of a numerically singular matrix")
    return hermitize((ed.vectors * w**t) @ ed.vectors.conj().T)


def powers(P, exponents, tol: ToleranceConfig = DEFAULT_TOL):
    """Several spectral powers of one PSD matrix from a single eigendecomposition."""
    ed = eig_hermitian(P, tol)
    w = ed.values
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[-1] < -tol.tau_psd * scale:
        raise DomainError(f"power of a non-PSD matrix (smallest eigenvalue {w[-1]:.3g})")
    w = np.maximum(w, 0.0)
    out = []
    for t in exponents:
        t = float(t)
        if t == 0.0:
            out.append(np.eye(len(w), dtype=np.complex128))
            continue
        if t < 0.0 and w[-1] <= STRICT_POSITIVITY * float(np.max(w)):
            raise SingularError("negative power of a numerically singular matrix")
        out.append(hermitize((ed.vectors * w**t) @ ed.vectors.conj().T))
    return out


def require_strictly_positive(A, tol: ToleranceConfig = DEFAULT_TOL, name="A"):
    w = eigenvalues_desc(A, tol)
    if w[-1] <= STRICT_POSITIVITY * max(float(np.max(np.abs(w))), np.finfo(float).tiny):
        raise SingularError(f"{name} is not strictly positive (smallest eigenvalue {w[-1]:.3g})")
    return w


def operator_abs(X, tol: ToleranceConfig = DEFAULT_TOL):
    """Modulus ``|X| = (X*X)^{1/2}``."""
    d = svd(X, tol)
    return hermitize((d.V * d.s) @ d.V.conj().T)


def polar_decompose(X, tol: ToleranceConfig = DEFAULT_TOL, unitary=False):
    """Polar decomposition ``X = W |X|``.

    By default ``W`` is the canonical partial isometry (``W*W`` projects onto
    the range of ``|X|``); with ``unitary=True`` it is completed to a unitary.
    """
    d = svd(X, tol)
    P = hermitize((d.V * d.s) @ d.V.conj().T)
    if unitary:
        W = d.U @ d.V.conj().T
    else:
        r = d.rank
        W = d.U[:, :r] @ d.V[:, :r].conj().T
    return W, P


# ---------------------------------------------------------------------------
# order relations
# ---------------------------------------------------------------------------

def loewner_leq(X, Y, tol: ToleranceConfig = DEFAULT_TOL) -> LoewnerResult:
    """Decide ``X <= Y`` in the Loewner order.

    ``gap`` is the smallest eigenvalue of ``Y - X``; the relation holds when
    ``gap >= -tau_psd * max(1, ||X||, ||Y||)``.
    """
    X = hermitize(X)
    Y = hermitize(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch {X.shape} vs {Y.shape}")
    gap = float(eigenvalues_desc(Y - X, tol)[-1])
    scale = max(1.0, opnorm(X, tol), opnorm(Y, tol))
    return LoewnerResult(gap >= -tol.tau_psd * scale, gap, scale)


def dominance_gap(x, y):
    """Smallest ``y_j - x_j`` over sorted spectra, and its index."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ShapeError("spectra of different length")
    d = y - x
    j = int(np.argmin(d))
    return float(d[j]), j


def eigenvalue_dominance(x, y, tol: ToleranceConfig = DEFAULT_TOL):
    """``x_j <= y_j`` for all j (both sorted descending), with Loewner-style slack."""
    gap, j = dominance_gap(x, y)
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    return LoewnerResult(gap >= -tol.tau_psd * scale, gap, scale), j


def weakly_majorizes(x, y, tol: ToleranceConfig = DEFAULT_TOL):
    """Ky Fan check: partial sums of ``x`` bounded by those of ``y``.  Returns (holds, gap)."""
    sx = np.cumsum(np.sort(np.asarray(x, dtype=float))[::-1])
    sy = np.cumsum(np.sort(np.asarray(y, dtype=float))[::-1])
    d = sy - sx
    scale = max(1.0, float(np.max(np.abs(sx))), float(np.max(np.abs(sy))))
    gap = float(np.min(d))
    return gap >= -tol.tau_psd * scale, gap


def weak_log_majorizes(x, y, rtol=1e-9):
    """True iff every partial product of ``x`` is at most ``(1 + rtol)^k`` times that of ``y``."""
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    y = np.sort(np.asarray(y, dtype=float))[::-1]
    if x.shape != y.shape:
        raise ShapeError("spectra of different length")
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("log-majorization needs non-negative entries")
    px = np.cumprod(x)
    py = np.cumprod(y)
    k = np.arange(1, len(x) + 1)
    return bool(np.all(px <= py * (1.0 + rtol) ** k))


def log_majorization_margin(x, y):
    """Smallest ``log prod y - log prod x`` over k (``-inf``/``inf`` handled for zeros)."""
    x = np.sort(np.asarray(x, dtype=float))[::-1]
    y = np.sort(np.asarray(y, dtype=float))[::-1]
    with np.errstate(divide="ignore"):
        lx = np.cumsum(np.log(np.maximum(x, 0.0)))
        ly = np.cumsum(np.log(np.maximum(y, 0.0)))
        d = ly - lx
    d = np.where(np.isnan(d), 0.0, d)
    return float(np.min(d))


def align_witness(X, Y, tol: ToleranceConfig = DEFAULT_TOL) -> WitnessCertificate:
    """Unitary ``V`` with ``X <= V Y V*`` from eigenvalue dominance.

    ``V = Q_X Q_Y*`` maps the descending eigenframe of ``Y`` onto that of ``X``,
    so ``V Y V* - X = Q_X diag(lambda(Y) - lambda(X)) Q_X*``.
    """
    ex = eig_hermitian(X, tol)
    ey = eig_hermitian(Y, tol)
    res, j = eigenvalue_dominance(ex.values, ey.values, tol)
    if not res.holds:
        raise DominanceError(
            f"eigenvalue dominance fails at index {j}: {ex.values[j]:.6g} > {ey.values[j]:.6g}",
            index=j,
        )
    V = ex.vectors @ ey.vectors.conj().T
    check = loewner_leq(X, V @ hermitize(Y) @ V.conj().T, tol)
    return WitnessCertificate("unitary", (V,), check.gap)
