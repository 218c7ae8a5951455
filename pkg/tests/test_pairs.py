import numpy as np
import pytest

from opineq import pairs as PR
from opineq.errors import PreconditionError
from opineq.linalg import eig_hermitian
from opineq.rng import random_psd, stream


def test_power_pair_examples(g):
    A = random_psd(3, g)
    pair = PR.make_power_pair(A, 1, 1)
    assert np.allclose(pair.A, A) and np.allclose(pair.B, A) and pair.concave
    pair = PR.make_power_pair(A, 0, 2)
    assert np.allclose(pair.A, np.eye(3))
    pair = PR.make_power_pair(random_psd(4, g), 0.5, 2)
    assert np.linalg.norm(pair.A @ pair.B - pair.B @ pair.A) <= 1e-12


def test_dim_one_pair_is_monotone():
    pair = PR.random_monotone_pair(1, stream(0, "one"))
    assert PR.is_monotone_pair(pair.A, pair.B)


def test_generated_concave_pairs_accepted():
    for t in range(20):
        pair = PR.random_monotone_pair(5, stream(1, "concave", t), concave=True)
        assert PR.is_concave_pair(pair.A, pair.B)


def test_generated_pairs_deterministic():
    a = PR.random_monotone_pair(4, stream(2, "det"))
    b = PR.random_monotone_pair(4, stream(2, "det"))
    assert np.array_equal(a.A, b.A) and np.array_equal(a.B, b.B)


def test_sqrt_pair_is_concave(g):
    A = random_psd(4, g)
    assert PR.is_concave_pair(A, A @ A)
    assert PR.is_monotone_pair(A @ A, A)
    assert not PR.is_concave_pair(A @ A, A)  # h(t) = t^2 is convex


def test_anti_monotone_rejected():
    assert not PR.is_monotone_pair(np.diag([1.0, 2.0]), np.diag([2.0, 1.0]))
    pair = PR.random_antimonotone_pair(3, stream(3, "anti"))
    assert not PR.is_monotone_pair(pair.A, pair.B)


def test_non_commuting_rejected(g):
    assert not PR.is_monotone_pair(random_psd(3, g), random_psd(3, g))


def test_swapping_eigenvalues_breaks_concave_pair():
    rejected = 0
    for t in range(10):
        pair = PR.random_monotone_pair(4, stream(4, "mut", t), concave=True)
        ed = eig_hermitian(pair.B)
        # A is a function of B; swap the A-values on the extreme B eigenvectors
        a = np.real(np.diag(ed.vectors.conj().T @ pair.A @ ed.vectors)).copy()
        if abs(a[0] - a[-1]) < 1e-6:
            continue
        a[0], a[-1] = a[-1], a[0]
        A2 = (ed.vectors * a) @ ed.vectors.conj().T
        assert not PR.is_concave_pair(A2, pair.B)
        rejected += 1
    assert rejected > 0


def test_equal_b_with_different_a_is_not_a_function():
    assert PR.is_monotone_pair(np.diag([1.0, 2.0]), np.diag([1.0, 1.0]))
    assert not PR.concave_interpolable([1.0, 2.0], [1.0, 1.0])


def test_concave_requires_nonnegative_at_zero():
    # points (1, 1) and (2, 3): the chord through them hits zero at 0.5 > 0
    assert not PR.concave_interpolable([1.0, 3.0], [1.0, 2.0])
    assert PR.concave_interpolable([2.0, 3.0], [1.0, 2.0])


def test_joint_spectrum_fallback_on_degenerate_sum():
    # A + pi B has a repeated eigenvalue while A and B individually do not
    A = np.diag([np.pi, 0.0, 5.0])
    B = np.diag([0.0, 1.0, 2.0])
    a, b, _ = PR.joint_spectrum(A, B)
    got = sorted(zip(a, b))
    assert np.allclose(got, [(0.0, 1.0), (np.pi, 0.0), (5.0, 2.0)], atol=1e-12)


def test_scalar_function_spec_validation():
    with pytest.raises(PreconditionError):
        PR.ScalarFunctionSpec((0.0, 1.0), (1.0, 0.5))
    with pytest.raises(PreconditionError):
        PR.ScalarFunctionSpec((0.0, 1.0, 2.0), (0.0, 1.0, 3.0), concave=True)
    h = PR.ScalarFunctionSpec((0.0, 1.0, 2.0), (0.0, 2.0, 3.0), concave=True)
    assert h(1.5) == pytest.approx(2.5)


def test_pair_json_round_trip():
    import json

    pair = PR.random_monotone_pair(3, stream(5, "json"), concave=True)
    again = PR.MonotonePair.from_json(json.loads(json.dumps(pair.to_json())))
    assert np.array_equal(again.A, pair.A) and np.array_equal(again.B, pair.B)
    C, f, g = again.generator
    assert np.allclose(f(np.diag(C).real), pair.generator[1](np.diag(C).real))
    assert again.concave


def test_scalar_chebyshev_with_uniform_state():
    from opineq.posmaps import TraceState

    for t in range(20):
        g = stream(6, "cheb", t)
        a = np.sort(g.uniform_range(0.0, 3.0, 5))
        b = np.sort(g.uniform_range(0.0, 3.0, 5))
        A, B = np.diag(a), np.diag(b)
        assert PR.is_monotone_pair(A, B)
        phi = TraceState(np.eye(5) / 5)
        assert (phi(A) * phi(B))[0, 0].real <= phi(A @ B)[0, 0].real + 1e-12


def test_power_pair_with_p_above_q_not_concave(g):
    pair = PR.make_power_pair(random_psd(4, g), 2.0, 1.0)
    assert PR.is_monotone_pair(pair.A, pair.B)
    assert not pair.concave and not PR.is_concave_pair(pair.A, pair.B)
