"""Hot kernels with a numba path and a pure-numpy fallback.

Set ``OPINEQ_DISABLE_NUMBA=1`` to force the numpy implementations (also used
automatically when numba cannot be imported).  Both paths implement the same
algorithms; the SplitMix64 block generator is bit-identical across them.
"""
import math
import os

import numpy as np

_DISABLED = os.environ.get("OPINEQ_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("numba disabled by OPINEQ_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


# ---------------------------------------------------------------------------
# SplitMix64
# ---------------------------------------------------------------------------

@njit(cache=True)
def _splitmix_block_nb(state, n):
    out = np.empty(n, dtype=np.uint64)
    gamma = np.uint64(0x9E3779B97F4A7C15)
    m1 = np.uint64(0xBF58476D1CE4E5B9)
    m2 = np.uint64(0x94D049BB133111EB)
    s = np.uint64(state)
    for i in range(n):
        s = s + gamma
        z = s
        z = (z ^ (z >> np.uint64(30))) * m1
        z = (z ^ (z >> np.uint64(27))) * m2
        out[i] = z ^ (z >> np.uint64(31))
    return out


def _splitmix_block_np(state, n):
    # state_i = state + (i + 1) * gamma, so the whole block vectorizes
    with np.errstate(over="ignore"):
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(state) + idx * GOLDEN_GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def splitmix_block(state, n):
    """Return the next ``n`` SplitMix64 outputs after ``state`` and the advanced state."""
    state = int(state) & 0xFFFFFFFFFFFFFFFF
    if HAVE_NUMBA:
        out = _splitmix_block_nb(np.uint64(state), n)
    else:
        out = _splitmix_block_np(state, n)
    new_state = (state + n * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    return out, new_state


# ---------------------------------------------------------------------------
# Cyclic complex Jacobi
# ---------------------------------------------------------------------------

@njit(cache=True)
def _jacobi_nb(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real ** 2 + a[i, j].imag ** 2
    fro = math.sqrt(fro)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * (a[i, j].real ** 2 + a[i, j].imag ** 2)
        if math.sqrt(off) <= tol * fro:
            w = np.empty(n)
            for i in range(n):
                w[i] = a[i, i].real
            return w, v, sweep, True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                e = apq / g
                ec = e.conjugate()
                theta = (aqq - app) / (2.0 * g)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ec * akq
                    a[k, q] = s * e * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * e * aqk
                    a[q, k] = s * ec * apk + c * aqk
                a[p, p] = app - t * g
                a[q, q] = aqq + t * g
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * ec * vkq
                    v[k, q] = s * e * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, max_sweeps, False


def _jacobi_np(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(np.abs(a[iu]) ** 2)))
        if off <= tol * fro:
            return a.diagonal().real.copy(), v, sweep, True
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                e = apq / g
                ec = e.conjugate()
                theta = (aqq - app) / (2.0 * g)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * ec * cq
                a[:, q] = s * e * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * e * rq
                a[q, :] = s * ec * rp + c * rq
                a[p, p] = app - t * g
                a[q, q] = aqq + t * g
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * ec * vq
                v[:, q] = s * e * vp + c * vq
    return a.diagonal().real.copy(), v, max_sweeps, False


def jacobi_sweeps(a, tol, max_sweeps):
    """Diagonalize Hermitian ``a`` in place by cyclic Jacobi.

    Returns ``(w, v, sweeps, converged)`` with unsorted eigenvalues ``w``.
    """
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    if HAVE_NUMBA:
        return _jacobi_nb(a, float(tol), int(max_sweeps))
    return _jacobi_np(a, float(tol), int(max_sweeps))
