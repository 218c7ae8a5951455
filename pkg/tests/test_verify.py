import numpy as np
import pytest

from opineq import verify as V
from opineq.errors import PreconditionError, SearchExhausted
from opineq.linalg import singular_values_desc
from opineq.pairs import MonotonePair, make_power_pair, random_antimonotone_pair, random_monotone_pair
from opineq.posmaps import (
    Compression,
    Congruence,
    Pinching,
    SchurMultiplier,
    identity_map,
    random_unit_diagonal_psd,
)
from opineq.rng import random_complex, random_positive_contraction, random_projection, random_psd, stream


def compression(n, k, g):
    return Compression(random_projection(n, k, g))


# --- powers under positive maps ---------------------------------------------

def test_T11_zero_exponents(g):
    rep = V.check_T11(compression(4, 3, g), random_psd(4, g), 0.0, 0.0)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-12)


def test_T11_unit_exponents_is_kadison(g):
    phi, A = compression(4, 2, g), random_psd(4, g)
    t11 = V.check_T11(phi, A, 1.0, 1.0)
    kad = V.check_kadison(phi, A)
    assert t11.holds and kad.holds
    assert t11.gap == pytest.approx(kad.gap, abs=1e-10)


def test_T11_random_compression(g):
    assert V.check_T11(compression(5, 3, g), random_psd(5, g), 0.7, 1.8).holds


def test_T11_rejects_order():
    with pytest.raises(PreconditionError):
        V.check_T11(identity_map(2), np.eye(2), 2.0, 1.0)


def test_T11_needs_subunital():
    with pytest.raises(PreconditionError):
        V.check_T11(Congruence(2 * np.eye(2)), np.eye(2), 0.5, 1.0)


def test_ineq11_random(g):
    assert V.check_ineq11(compression(5, 4, g), random_psd(5, g), 0.4, 2.0).holds


def test_C12_both_orders(g):
    phi, A = compression(5, 3, g), random_psd(5, g)
    for p, q in [(0.5, 1.5), (2.5, 0.3)]:
        rep = V.check_C12(phi, A, p, q)
        assert rep.holds and rep.witness is not None
        assert rep.witness.kind_ok() and rep.witness.residual >= -1e-8


def test_unitary_free_commuting_baseline():
    gap, _, _ = V.unitary_free_gap(0.0, 3.0, 1.0)
    assert gap >= -1e-12


def test_unitary_free_counterexample_found():
    best, rep = V.search_unitary_counterexample()
    assert best["gap"] < -1e-7
    assert best["dominance_holds"]
    assert best["sign_stable"] and best["refined_gap"] < 0
    assert abs(best["refined_gap"] - best["gap"]) <= 1e-10
    assert not rep.holds and not rep.asserted


def test_unitary_free_exhausted_at_zero_eps():
    with pytest.raises(SearchExhausted) as exc:
        V.search_unitary_counterexample(eps_grid=(0.0,))
    assert exc.value.best["gap"] >= -1e-12


def test_P13_examples(g):
    phi, A = compression(4, 3, g), random_psd(4, g)
    rep = V.check_P13(phi, A, 0.0, 1.3, 0.0)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)
    assert V.check_P13(phi, A, 1.0, 2.0, 1.0).holds
    assert V.check_P13(phi, A, 1.0, 1.0, 0.5).holds
    with pytest.raises(PreconditionError):
        V.check_P13(phi, A, 1.0, 1.0, 0.9)


def test_P14_examples(g):
    phi, A = compression(4, 3, g), random_psd(4, g)
    assert V.check_P14(phi, A, 0.0, 0.0, 0.0).gap == pytest.approx(0.0, abs=1e-10)
    assert V.check_P14(phi, A, 0.8, 1.0, 0.9).holds


def test_BK(g):
    rep = V.check_BK(random_complex(4, g), random_complex(4, g))
    assert rep.holds and rep.witness.kind_ok()


def test_choi_inequalities(g):
    phi = SchurMultiplier(random_unit_diagonal_psd(4, g))
    A = random_psd(4, g)
    assert V.check_choi_low(phi, A, 0.5).holds
    assert V.check_choi_high(phi, A, 1.7).holds


# --- monotone pairs ---------------------------------------------------------

def test_T21_identity_projection(g):
    pair = random_monotone_pair(4, g)
    rep = V.check_T21(pair, np.eye(4))
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)


def test_T21_diagonal_scalar_oracle():
    a, b = np.array([1.0, 2.0, 3.0]), np.array([0.5, 1.0, 4.0])
    E = np.diag([1.0, 0.0, 1.0])
    pair = MonotonePair(np.diag(a), np.diag(b))
    rep = V.check_T21(pair, E)
    # both sides are diagonal: a_i b_i on the kept coordinates
    assert rep.holds
    assert np.allclose(singular_values_desc(pair.A @ E @ pair.B), [12.0, 0.5, 0.0])


def test_eq21_random_concave():
    g = stream(5, "eq21")
    pair = random_monotone_pair(6, g, concave=True)
    E = random_projection(6, 3, g)
    assert V.check_T21(pair, E).holds
    rep = V.check_eq21(pair, E, which="both")
    assert rep.holds and rep.details["a_gap"] >= -1e-8 and rep.details["b_gap"] >= -1e-8


def test_anti_monotone_control_can_fail():
    failures = 0
    for t in range(30):
        g = stream(6, "anti", t)
        pair = random_antimonotone_pair(3, g)
        failures += not V.check_T21(pair, random_projection(3, 1, g), case_id="T2.1-anti").holds
    assert failures > 0


def test_C22_identity_equality(g):
    pair = random_monotone_pair(3, g)
    rep = V.check_C22(identity_map(3), pair)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)


def test_C22_pinching_and_subunital(g):
    pair = random_monotone_pair(5, g)
    assert V.check_C22(Pinching(5, ((0, 3), (1,), (2, 4))), pair).case_id == "C2.2"
    Z = random_positive_contraction(5, g)
    rep = V.check_C22(Congruence(Z, sub_unital=True), pair)
    assert rep.case_id == "C2.2a" and rep.holds


def test_C22_congruence_matches_dilation(g):
    # a congruence by a positive contraction is a compression of the dilation
    from opineq.posmaps import dilation_projection

    Z = random_positive_contraction(3, g)
    E = dilation_projection(Z)
    X = random_psd(3, g)
    X0 = np.zeros((6, 6), dtype=complex)
    X0[:3, :3] = X
    assert np.allclose((E @ X0 @ E)[:3, :3], Congruence(Z, sub_unital=True)(X))


def test_C22_rejects_non_monotone(g):
    with pytest.raises(PreconditionError):
        V.check_C22(identity_map(3), MonotonePair(random_psd(3, g), random_psd(3, g)))


def test_T23_identity():
    K, U, rep = V.factorize_T23(identity_map(2), MonotonePair(np.eye(2), np.eye(2)))
    assert rep.holds
    assert np.allclose(K @ U, np.eye(2))


def test_T23_diagonal_concave_compression():
    g = stream(7, "t23")
    b = np.array([0.5, 1.0, 2.0, 3.0])
    pair = MonotonePair(np.diag(np.sqrt(b)), np.diag(b))
    _, _, rep = V.factorize_T23(compression(4, 2, g), pair)
    assert rep.holds and rep.details["reconstruction_residual"] <= 1e-9


def test_T23_random_schur():
    g = stream(8, "t23")
    pair = random_monotone_pair(4, g, concave=True)
    K, U, rep = V.factorize_T23(SchurMultiplier(random_unit_diagonal_psd(4, g)), pair)
    assert rep.holds
    assert singular_values_desc(K)[0] <= 1 + 1e-8
    assert np.allclose(U.conj().T @ U, np.eye(4), atol=1e-10)
    assert rep.details["reconstruction_residual"] <= 1e-8


def test_T23_requires_concave(g):
    A = random_psd(3, g)
    with pytest.raises(PreconditionError):
        V.factorize_T23(identity_map(3), make_power_pair(A, 2.0, 1.0))


def test_C24_C25_identity_commuting(g):
    pair = make_power_pair(random_psd(3, g), 0.5, 1.0)
    rep = V.check_C24_C25(identity_map(3), pair)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)


def test_C24_C25_random_compression():
    g = stream(9, "c24")
    pair = random_monotone_pair(5, g, concave=True)
    phi = compression(5, 3, g)
    assert V.check_C24(phi, pair).holds
    assert V.check_C25(phi, pair).holds


def test_C24_explore_not_asserted(g):
    pair = make_power_pair(random_psd(3, g), 2.0, 1.0)  # convex h
    rep = V.check_C24_C25(compression(3, 2, g), pair, exploratory=True)
    assert not rep.asserted and rep.case_id.endswith("explore")


def test_P26_examples(g):
    phi, A = compression(6, 4, g), random_psd(6, g)
    rep = V.check_P26(phi, A, 0.0, 1.2)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)
    assert V.check_P26(phi, A, 1.3, 0.4).holds


def test_P26_diagonal_pinching_scalar():
    a = np.array([0.5, 2.0, 1.5])
    rep = V.check_P26(Pinching(3, ((0,), (1,), (2,))), np.diag(a), 1.0, 2.0)
    # diagonal pinching leaves diag(a) alone: lambda_j(a) lambda_j(a^2) = lambda_j(a^3)
    assert rep.holds and rep.gap == pytest.approx(0.0, abs=1e-10)


def test_triangle_examples(g):
    A = random_complex(3, g)
    assert V.check_triangle_28(A, np.zeros((3, 3))).gap == pytest.approx(0.0, abs=1e-9)
    P1, P2 = random_psd(3, g), random_psd(3, g)
    assert V.check_triangle_28(P1, P2).gap == pytest.approx(0.0, abs=1e-9)
    rep = V.check_triangle_28(random_complex(5, g), random_complex(5, g))
    assert rep.holds and rep.witness.kind == "partial_isometry"


def test_dilation_check(g):
    rep = V.check_dilation(random_positive_contraction(4, g), random_psd(4, g))
    assert rep.holds


def test_equality_case_diagnostic(g):
    # the identity map attains equality, and then Phi(A^t) = Phi(A)^t at every sampled t
    rep = V.check_T11(identity_map(3), random_psd(3, g), 0.5, 1.0)
    assert rep.details["equality_case"] and rep.details["power_residual"] <= 1e-12
    rep = V.check_T11(compression(4, 2, g), random_psd(4, g), 0.5, 1.0)
    assert "equality_case" not in rep.details
    assert V.equality_diagnostic(compression(4, 2, g), random_psd(4, g)) > 1e-6
