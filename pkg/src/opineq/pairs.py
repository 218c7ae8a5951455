"""Monotone pairs ``(f(C), g(C))`` and concave monotone pairs ``(h(B), B)``."""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import PreconditionError, SingularError
from .linalg import as_psd, eig_hermitian, hermitize
from .matrix_io import matrix_from_json, matrix_to_json
from .tolerance import DEFAULT_TOL, ToleranceConfig

COMMUTE_RTOL = 1e-9
SPECTRAL_RTOL = 1e-9
OFFDIAG_RTOL = 1e-9


@dataclass(frozen=True)
class ScalarFunctionSpec:
    """Piecewise-linear function through ``(knots, values)``; constant beyond the end knots."""

    knots: Tuple[float, ...]
    values: Tuple[float, ...]
    non_negative: bool = True
    non_decreasing: bool = True
    concave: bool = False

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or len(k) == 0:
            raise PreconditionError("knots and values must be equal-length 1-d sequences")
        if np.any(np.diff(k) <= 0):
            raise PreconditionError("knots must be strictly ascending")
        if self.non_negative and np.any(v < 0):
            raise PreconditionError("function flagged non-negative has a negative value")
        dv = np.diff(v)
        if self.non_decreasing and np.any(dv < 0):
            raise PreconditionError("function flagged non-decreasing decreases")
        if self.concave and len(k) > 2:
            slopes = dv / np.diff(k)
            if np.any(np.diff(slopes) > 1e-12 * max(1.0, float(np.max(np.abs(slopes))))):
                raise PreconditionError("function flagged concave has increasing slopes")
        object.__setattr__(self, "knots", tuple(float(x) for x in k))
        object.__setattr__(self, "values", tuple(float(x) for x in v))

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.knots, self.values)

    @classmethod
    def sampled(cls, points, func, **flags):
        """Exact samples of ``func`` at the distinct ``points`` (no interpolation error there)."""
        k = np.unique(np.asarray(points, dtype=float))
        return cls(tuple(k), tuple(func(k)), **flags)


@dataclass
class MonotonePair:
    A: np.ndarray
    B: np.ndarray
    generator: Optional[tuple] = None  # (C, f, g)
    concave: bool = False
    used_fallback: bool = False

    @property
    def dim(self):
        return self.A.shape[0]

    def to_json(self):
        out = {"A": matrix_to_json(self.A), "B": matrix_to_json(self.B), "concave": bool(self.concave)}
        if self.generator is not None:
            C, f, g = self.generator
            out["generator"] = {
                "C": matrix_to_json(C),
                "f": {"knots": list(f.knots), "values": list(f.values)},
                "g": {"knots": list(g.knots), "values": list(g.values)},
            }
        return out

    @classmethod
    def from_json(cls, obj):
        gen = obj.get("generator")
        generator = None
        if gen is not None:
            f = ScalarFunctionSpec(tuple(gen["f"]["knots"]), tuple(gen["f"]["values"]))
            g = ScalarFunctionSpec(tuple(gen["g"]["knots"]), tuple(gen["g"]["values"]))
            generator = (matrix_from_json(gen["C"]), f, g)
        return cls(matrix_from_json(obj["A"]), matrix_from_json(obj["B"]), generator, bool(obj.get("concave", False)))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def make_power_pair(A, p, q, tol: ToleranceConfig = DEFAULT_TOL) -> MonotonePair:
    """``(A^p, A^q)`` from one eigendecomposition; concave when ``p <= q``."""
    p, q = float(p), float(q)
    if p < 0 or q < 0:
        raise SingularError("power pairs use non-negative exponents only")
    A = as_psd(A, tol)
    ed = eig_hermitian(A, tol)
    w = np.maximum(ed.values, 0.0)
    Q = ed.vectors
    Ap = hermitize((Q * w**p) @ Q.conj().T)
    Aq = hermitize((Q * w**q) @ Q.conj().T)
    f = ScalarFunctionSpec.sampled(w, lambda t: t**p, concave=p <= 1)
    g = ScalarFunctionSpec.sampled(w, lambda t: t**q, concave=q <= 1)
    return MonotonePair(Ap, Aq, (A, f, g), concave=p <= q)


def _random_increments(rng, m, zero_prob=0.2):
    inc = rng.uniform_range(0.0, 1.0, m)
    zero = rng.uniform(m) < zero_prob
    inc[zero] = 0.0
    return inc


def _random_nondecreasing(rng, xmax, base_lo, base_hi, nknots=4):
    """Random non-negative non-decreasing piecewise-linear function on [0, xmax]."""
    inner = np.sort(rng.uniform_range(0.0, xmax, nknots - 2)) if nknots > 2 else np.array([])
    knots = np.unique(np.concatenate(([0.0], inner, [max(xmax, 1e-3)])))
    base = rng.uniform_range(base_lo, base_hi)
    values = base + np.concatenate(([0.0], np.cumsum(_random_increments(rng, len(knots) - 1))))
    return ScalarFunctionSpec(tuple(knots), tuple(values))


def _random_concave(rng, xmax, base_lo, base_hi, nknots=4):
    """Random non-negative non-decreasing concave piecewise-linear function on [0, xmax]."""
    inner = np.sort(rng.uniform_range(0.0, xmax, nknots - 2)) if nknots > 2 else np.array([])
    knots = np.unique(np.concatenate(([0.0], inner, [max(xmax, 1e-3)])))
    slopes = np.sort(rng.uniform_range(0.0, 2.0, len(knots) - 1))[::-1]
    base = rng.uniform_range(base_lo, base_hi)
    values = base + np.concatenate(([0.0], np.cumsum(slopes * np.diff(knots))))
    return ScalarFunctionSpec(tuple(knots), tuple(values), concave=True)


def random_monotone_pair(dim, rng, concave=False, invertible=True) -> MonotonePair:
    """Random monotone pair generated by a PSD ``C`` and piecewise-linear ``f``, ``g``.

    With ``concave=True`` the pair is ``(h(g(C)), g(C))`` for a random concave
    non-decreasing non-negative ``h``.  ``invertible`` keeps both spectra away
    from zero.
    """
    from .rng import haar_unitary

    U = haar_unitary(dim, rng)
    c = rng.uniform_range(0.0, 3.0, dim)
    # occasional repeated eigenvalues exercise the degenerate paths
    if dim > 1 and rng.uniform() < 0.2:
        c[1] = c[0]
    lo, hi = (0.05, 0.5) if invertible else (0.0, 0.5)
    cmax = float(np.max(c))
    g = _random_nondecreasing(rng, cmax, lo, hi)
    gc = g(c)
    if concave:
        h = _random_concave(rng, float(np.max(gc)), lo, hi)
        fc = h(gc)
    else:
        fc = _random_nondecreasing(rng, cmax, lo, hi)(c)
    C = hermitize((U * c) @ U.conj().T)
    f_spec = ScalarFunctionSpec.sampled(c, lambda t: np.interp(t, c[np.argsort(c)], fc[np.argsort(c)]))
    g_spec = ScalarFunctionSpec.sampled(c, g)
    A = hermitize((U * fc) @ U.conj().T)
    B = hermitize((U * gc) @ U.conj().T)
    return MonotonePair(A, B, (C, f_spec, g_spec), concave=concave)


def random_antimonotone_pair(dim, rng) -> MonotonePair:
    """Commuting PSD pair with strictly opposite eigenvalue orderings (a negative control)."""
    from .rng import haar_unitary

    U = haar_unitary(dim, rng)
    a = np.sort(rng.uniform_range(0.1, 3.0, dim))
    b = np.sort(rng.uniform_range(0.1, 3.0, dim))[::-1]
    A = hermitize((U * a) @ U.conj().T)
    B = hermitize((U * b) @ U.conj().T)
    return MonotonePair(A, B, None, concave=False)


# ---------------------------------------------------------------------------
# recognition
# ---------------------------------------------------------------------------

def _offdiag(M):
    return float(np.linalg.norm(M - np.diag(np.diag(M))))


def joint_spectrum(A, B, tol: ToleranceConfig = DEFAULT_TOL):
    """Joint eigenvalues ``(a, b, used_fallback)`` of commuting Hermitian ``A``, ``B``.

    Returns ``None`` when the matrices do not commute.  The primary route
    diagonalizes ``A + pi B``; if that leaves off-diagonal mass (near-degenerate
    sum spectrum) it falls back to diagonalizing ``B`` inside each eigenspace of
    ``A``.
    """
    A = hermitize(A)
    B = hermitize(B)
    na, nb = np.linalg.norm(A), np.linalg.norm(B)
    if np.linalg.norm(A @ B - B @ A) > COMMUTE_RTOL * max(na * nb, np.finfo(float).tiny):
        return None
    scale = max(1.0, na, nb)
    Q = eig_hermitian(A + math.pi * B, tol).vectors
    QA = Q.conj().T @ A @ Q
    QB = Q.conj().T @ B @ Q
    if _offdiag(QA) <= OFFDIAG_RTOL * scale and _offdiag(QB) <= OFFDIAG_RTOL * scale:
        return np.diag(QA).real.copy(), np.diag(QB).real.copy(), False

    ea = eig_hermitian(A, tol)
    w = ea.values
    clusters = [[0]]
    for i in range(1, len(w)):
        if w[clusters[-1][-1]] - w[i] <= SPECTRAL_RTOL * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    a_out, b_out = [], []
    for cl in clusters:
        Qc = ea.vectors[:, cl]
        eb = eig_hermitian(Qc.conj().T @ B @ Qc, tol)
        a_out.extend([float(np.mean(w[cl]))] * len(cl))
        b_out.extend(eb.values.tolist())
    return np.array(a_out), np.array(b_out), True


def _thresholds(a, b):
    ta = SPECTRAL_RTOL * max(1.0, float(np.max(np.abs(a))))
    tb = SPECTRAL_RTOL * max(1.0, float(np.max(np.abs(b))))
    return ta, tb


def comonotone(a, b):
    """``(a_i - a_j)(b_i - b_j) >= 0`` for all i, j, with differences below tolerance treated as 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ta, tb = _thresholds(a, b)
    if np.any(a < -ta) or np.any(b < -tb):
        return False
    da = a[:, None] - a[None, :]
    db = b[:, None] - b[None, :]
    da[np.abs(da) <= ta] = 0.0
    db[np.abs(db) <= tb] = 0.0
    return bool(np.all(da * db >= 0.0))


def concave_interpolable(a, b):
    """Whether points ``(b_i, a_i)`` lie on a non-negative non-decreasing concave ``h`` on [0, inf)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ta, tb = _thresholds(a, b)
    if np.any(a < -ta) or np.any(b < -tb):
        return False
    order = np.lexsort((a, b))
    xs, ys = [], []
    for i in order:
        if xs and b[i] - xs[-1] <= tb:
            if abs(a[i] - ys[-1]) > ta:
                return False  # same abscissa, different values: not a function of B
            continue
        xs.append(float(b[i]))
        ys.append(float(a[i]))
    if xs[0] > tb:
        # h(0) >= 0 is achievable iff the origin keeps the chord slopes non-increasing
        xs.insert(0, 0.0)
        ys.insert(0, 0.0)
    x = np.array(xs)
    y = np.array(ys)
    if np.any(np.diff(y) < -ta):
        return False
    for k in range(1, len(x) - 1):
        left = (y[k] - y[k - 1]) * (x[k + 1] - x[k])
        right = (y[k + 1] - y[k]) * (x[k] - x[k - 1])
        slack = 2.0 * ta * (x[k + 1] - x[k - 1]) + 2.0 * tb * (abs(y[k + 1] - y[k]) + abs(y[k] - y[k - 1]))
        if right > left + slack:
            return False
    return True


def is_monotone_pair(A, B, tol: ToleranceConfig = DEFAULT_TOL, info=None):
    js = joint_spectrum(A, B, tol)
    if js is None:
        return False
    a, b, fallback = js
    if info is not None:
        info["used_fallback"] = fallback
    return comonotone(a, b)


def is_concave_pair(A, B, tol: ToleranceConfig = DEFAULT_TOL, info=None):
    """Monotone and ``A = h(B)`` for some concave ``h: [0, inf) -> [0, inf)``, non-decreasing."""
    js = joint_spectrum(A, B, tol)
    if js is None:
        return False
    a, b, fallback = js
    if info is not None:
        info["used_fallback"] = fallback
    return comonotone(a, b) and concave_interpolable(a, b)
