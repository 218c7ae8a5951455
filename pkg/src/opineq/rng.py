"""Portable seeded randomness.

The generator is SplitMix64; Gaussians come from Box-Muller on 53-bit
uniforms and Haar unitaries from Gram-Schmidt of complex Gaussian matrices.
These algorithms are fixed so that an instance is determined by
``(seed, case, dim, trial)`` alone.
"""
import numpy as np

from ._accel import splitmix_block

MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_53 = float(2**53)


def _fnv1a64(text):
    h = 0xCBF29CE484222325
    for b in text.encode():
        h ^= b
        h = (h * 0x100000001B3) & MASK64
    return h


class SplitMix64:
    def __init__(self, seed=0):
        self.state = int(seed) & MASK64

    def u64(self, n):
        out, self.state = splitmix_block(self.state, int(n))
        return out

    def uniform(self, n=None):
        """Uniforms in [0, 1) with 53 random bits."""
        k = 1 if n is None else int(n)
        x = (self.u64(k) >> np.uint64(11)).astype(np.float64) / _TWO_53
        return float(x[0]) if n is None else x

    def uniform_range(self, lo, hi, n=None):
        u = self.uniform(n)
        return lo + (hi - lo) * u

    def integer(self, lo, hi):
        """Integer in [lo, hi)."""
        return lo + min(int(self.uniform() * (hi - lo)), hi - lo - 1)

    def choice(self, seq):
        return seq[self.integer(0, len(seq))]

    def normal(self, n):
        m = (int(n) + 1) // 2
        u = self.uniform(2 * m)
        u1 = 1.0 - u[0::2]  # (0, 1]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * m)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        return z[:n]

    def complex_normal(self, shape):
        """Standard complex Gaussians, E|z|^2 = 1."""
        size = int(np.prod(shape))
        z = self.normal(2 * size)
        return ((z[0::2] + 1j * z[1::2]) / np.sqrt(2.0)).reshape(shape)

    def spawn(self, *keys):
        return stream(self.state, *keys)


def stream(seed, *keys):
    """Independent generator for a tuple of keys, e.g. ``stream(42, "T1.1", 4, 17)``."""
    state = int(seed) & MASK64
    for key in keys:
        state ^= _fnv1a64(str(key))
        out, _ = splitmix_block(state, 1)
        state = int(out[0])
    return SplitMix64(state)


# ---------------------------------------------------------------------------
# random matrices
# ---------------------------------------------------------------------------

def gram_schmidt(G):
    """Modified Gram-Schmidt on the columns of ``G`` (assumed full rank)."""
    Q = np.array(G, dtype=np.complex128, copy=True)
    n = Q.shape[1]
    for j in range(n):
        for i in range(j):
            Q[:, j] -= (Q[:, i].conj() @ Q[:, j]) * Q[:, i]
        Q[:, j] /= np.linalg.norm(Q[:, j])
    return Q


def haar_unitary(n, rng):
    return gram_schmidt(rng.complex_normal((n, n)))


def random_complex(n, rng, m=None):
    return rng.complex_normal((n, n if m is None else m))


def random_hermitian(n, rng):
    G = rng.complex_normal((n, n))
    return (G + G.conj().T) / 2.0


def random_psd(n, rng, lo=0.05, hi=3.0, rank=None):
    """Haar-rotated diagonal with eigenvalues uniform in [lo, hi] (zeros beyond ``rank``)."""
    U = haar_unitary(n, rng)
    w = rng.uniform_range(lo, hi, n)
    if rank is not None:
        w[rank:] = 0.0
    M = (U * w) @ U.conj().T
    return (M + M.conj().T) / 2.0


def random_projection(n, rank, rng):
    U = haar_unitary(n, rng)[:, :rank]
    E = U @ U.conj().T
    return (E + E.conj().T) / 2.0


def random_positive_contraction(n, rng):
    """``0 <= Z <= I`` with Haar eigenvectors and eigenvalues uniform in [0, 1]."""
    return random_psd(n, rng, 0.0, 1.0)


def random_contraction(n, rng):
    """General contraction: Gaussian matrix with singular values clamped to at most 1."""
    from .linalg import svd

    d = svd(rng.complex_normal((n, n)))
    return (d.U * np.minimum(d.s, 1.0)) @ d.V.conj().T


def random_ordered_pair(n, rng, lo=0.05, hi=3.0, strict=True):
    """Random ``A >= B >= 0``; ``A - B`` has random rank so the order is often tight."""
    B = random_psd(n, rng, lo if strict else 0.0, hi)
    k = rng.integer(1, n + 1)
    D = random_psd(n, rng, 0.0, hi, rank=k)
    A = B + D
    return (A + A.conj().T) / 2.0, B
