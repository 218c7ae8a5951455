import numpy as np
import pytest

from opineq import means as M
from opineq.errors import PreconditionError, SingularError
from opineq.linalg import frac_power
from opineq.rng import haar_unitary, random_ordered_pair, random_psd, stream

# A = diag(1, 4), B = [[2, 1], [1, 2]], alpha = 1/2, evaluated with mpmath at 50
# digits and cross-checked against the two-by-two closed form
# sqrt(sqrt(ab)) (A/sqrt(a) + B/sqrt(b)) / sqrt(det(A/sqrt(a) + B/sqrt(b))).
GM_ORACLE = np.array([
    [1.39317155626922198000411836443, 0.486098816301352679375130301792],
    [0.486098816301352679375130301792, 2.65609332726877184376569164698],
])


def test_mean_scalar_case():
    assert np.allclose(M.geometric_mean(np.eye(3), 4 * np.eye(3), 0.5), 2 * np.eye(3))


def test_mean_endpoints(g):
    A, B = random_psd(4, g), random_psd(4, g)
    assert np.allclose(M.geometric_mean(A, B, 0.0), A)
    assert np.allclose(M.geometric_mean(A, B, 1.0), B)


def test_mean_high_precision_oracle():
    G = M.geometric_mean(np.diag([1.0, 4.0]), np.array([[2.0, 1.0], [1.0, 2.0]]), 0.5)
    assert np.max(np.abs(G - GM_ORACLE)) <= 1e-13


def test_mean_is_symmetric_at_half(g):
    A, B = random_psd(4, g), random_psd(4, g)
    assert np.allclose(M.geometric_mean(A, B, 0.5), M.geometric_mean(B, A, 0.5), atol=1e-10)


def test_mean_rejects_bad_inputs():
    with pytest.raises(SingularError):
        M.geometric_mean(np.diag([1.0, 0.0]), np.eye(2), 0.5)
    with pytest.raises(PreconditionError):
        M.geometric_mean(np.eye(2), np.eye(2), 1.5)


def test_congruence_axiom(g):
    A, B = random_psd(5, g), random_psd(5, g)
    assert M.check_congruence_axiom(A, B, 0.3, np.eye(5)).gap >= 0
    U = haar_unitary(2, g)
    assert M.check_congruence_axiom(np.diag([1.0, 2.0]), np.diag([3.0, 0.5]), 0.7, U).holds
    X = haar_unitary(5, g) * np.array([0.5, 1, 1.5, 2, 3]) @ haar_unitary(5, g)
    assert M.check_congruence_axiom(A, B, 0.4, X).holds


def test_reiteration(g):
    A, B = random_psd(4, g), random_psd(4, g)
    assert M.check_reiteration(A, B, 0.3, 0.3, 0.8).holds
    assert M.check_reiteration(A, B, 0.2, 0.9, 0.0).holds
    assert M.check_reiteration(A, B, 0.2, 0.9, 0.35).holds


def test_ando_hiai(g):
    A, B = np.diag([1.0, 3.0, 0.5]), np.diag([2.0, 0.4, 1.0])
    rep = M.check_ando_hiai(A, B, 0.3, 0.5)
    assert rep.holds and abs(rep.details["left_norm"] - rep.details["right_norm"]) <= 1e-12
    A, B = random_psd(3, g), random_psd(3, g)
    assert M.check_ando_hiai(A, B, 0.5, 0.5).holds
    rep = M.check_ando_hiai(A, B, 0.5, 0.999)
    assert rep.holds and rep.details["right_norm"] - rep.details["left_norm"] <= 1e-2 * rep.details["right_norm"]


def test_lemmas_identity_case():
    rep = M.check_mean_lemmas(np.eye(3), np.eye(3), 2.0, 1.0)
    assert rep.holds


def test_lemma32_scalar_oracle():
    a, b, p, r = np.array([2.0, 3.0]), np.array([1.0, 2.0]), 2.0, 1.0
    beta = r / (p + r)
    scalar = a ** (-r * (1 - beta)) * b ** (p * beta)
    assert np.all(scalar <= 1.0)
    rep = M.check_lemma32(np.diag(a), np.diag(b), p, r)
    assert rep.holds
    assert rep.gap == pytest.approx(1.0 - scalar.max(), abs=1e-12)


def test_lemmas_random(g):
    A, B = random_ordered_pair(4, g)
    assert M.check_lemma32(A, B, 3.0, 0.7).holds
    assert M.check_lemma33(A, B, 3.0, 0.7).holds


def test_lemmas_need_order():
    with pytest.raises(PreconditionError):
        M.check_lemma32(np.eye(2), 2 * np.eye(2), 2.0, 1.0)


def test_furuta_equal_matrices(g):
    A = random_psd(3, g)
    lhs, rhs, _ = M.furuta_sides(A, A, 2.0, 1.0, 1.5)
    assert np.allclose(lhs, rhs, atol=1e-10)
    assert np.allclose(lhs, frac_power(A, 2.0), atol=1e-10)


def test_kwong_case(g):
    A, B = random_ordered_pair(4, g, strict=False)
    rep = M.check_furuta(A, B, M.FurutaParams(2.0, 2.0, 2.0), case_id="kwong")
    assert rep.holds


def test_furuta_allows_singular_A():
    A = np.diag([2.0, 0.0])
    B = np.diag([1.0, 0.0])
    assert M.check_furuta(A, B, M.FurutaParams(2.0, 1.0, 1.5)).holds


def test_furuta_region_validation():
    with pytest.raises(PreconditionError):
        M.FurutaParams(2.0, 1.0, 1.0).validate()
    with pytest.raises(PreconditionError):
        M.FurutaParams(0.5, 1.0, 2.0).validate()
    assert M.FurutaParams(2.0, 2.0, 4.0 / 3.0).in_region()


def test_furuta_ridge_reports_eps(g):
    A, B = random_ordered_pair(3, g)
    rep = M.check_furuta(A, B, M.FurutaParams(2.0, 1.0, 1.5), use_ridge=True)
    assert rep.holds and rep.details["ridge_eps"] > 0


def test_boundary_search_finds_violations():
    res = M.furuta_boundary_search(stream(0, "boundary"), samples=400)
    assert res["violations"] > 0
    assert res["best"]["gap"] < 0
