import numpy as np

from opineq import rng as R
from opineq.linalg import eigenvalues_desc, is_projection, singular_values_desc


def test_stream_is_deterministic_and_key_sensitive():
    a = R.stream(42, "T1.1", 4, 17).u64(4)
    assert np.array_equal(a, R.stream(42, "T1.1", 4, 17).u64(4))
    assert not np.array_equal(a, R.stream(42, "T1.1", 4, 18).u64(4))
    assert not np.array_equal(a, R.stream(43, "T1.1", 4, 17).u64(4))


def test_uniform_range_and_integer():
    g = R.SplitMix64(5)
    u = g.uniform(10_000)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.02
    ints = [g.integer(2, 5) for _ in range(500)]
    assert set(ints) == {2, 3, 4}


def test_normal_moments():
    z = R.SplitMix64(11).normal(20_000)
    assert abs(z.mean()) < 0.03 and abs(z.std() - 1.0) < 0.03
    c = R.SplitMix64(12).complex_normal((10_000,))
    assert abs(np.mean(np.abs(c) ** 2) - 1.0) < 0.05


def test_haar_unitary_is_unitary(g):
    for n in (1, 3, 6):
        U = R.haar_unitary(n, g)
        assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-12)


def test_random_matrix_families(g):
    A = R.random_psd(5, g, 0.1, 2.0)
    w = eigenvalues_desc(A)
    assert w[-1] >= 0.1 - 1e-12 and w[0] <= 2.0 + 1e-12
    assert np.allclose(eigenvalues_desc(R.random_psd(4, g, rank=2))[2:], 0.0, atol=1e-12)
    E = R.random_projection(6, 3, g)
    assert is_projection(E) and np.trace(E).real == pytest_approx(3.0)
    assert singular_values_desc(R.random_contraction(4, g))[0] <= 1.0 + 1e-12
    Z = R.random_positive_contraction(4, g)
    w = eigenvalues_desc(Z)
    assert w[-1] >= -1e-12 and w[0] <= 1.0 + 1e-12


def pytest_approx(x):
    import pytest

    return pytest.approx(x, abs=1e-10)


def test_ordered_pair(g):
    for n in (2, 4):
        A, B = R.random_ordered_pair(n, g)
        assert eigenvalues_desc(A - B)[-1] >= -1e-12
        assert eigenvalues_desc(B)[-1] > 0
