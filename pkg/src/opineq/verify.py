"""Checkers for the operator inequalities, each returning an :class:`InequalityCheckReport`.

Statements of the form "X <= V Y V* for some unitary V" are decided through
eigenvalue dominance, which is equivalent in finite dimensions, and the
unitary is then built explicitly by :func:`align_witness` and re-verified.
"""
import numpy as np

from .errors import DominanceError, PreconditionError, SearchExhausted, SingularError
from .linalg import (
    align_witness,
    eigenvalue_dominance,
    eigenvalues_desc,
    eig_hermitian,
    frac_power,
    hermitize,
    is_projection,
    log_majorization_margin,
    loewner_leq,
    operator_abs,
    opnorm,
    polar_decompose,
    powers,
    psd_product_eigenvalues,
    require_strictly_positive,
    singular_values_desc,
    weak_log_majorizes,
    weakly_majorizes,
)
from .pairs import MonotonePair, is_concave_pair, is_monotone_pair
from .posmaps import COUNTEREXAMPLE_SYMBOL, SchurMultiplier, Unitality, classify_unitality, perturbed_diagonal
from .report import InequalityCheckReport, WitnessCertificate
from .tolerance import DEFAULT_TOL, ToleranceConfig

FACTOR_RTOL = 1e-8
WLOG_RTOL = 1e-9
PSEUDO_INVERSE_RTOL = 1e-12

EQUALITY_SAMPLE_T = (0.25, 0.5, 2.0, 3.0)
COUNTEREXAMPLE_P_GRID = (1.5, 2.0, 3.0)
COUNTEREXAMPLE_Q_GRID = (0.25, 0.5, 1.0)
COUNTEREXAMPLE_EPS_GRID = tuple(10.0**-k for k in range(1, 7))


def _phi(phi, X):
    return hermitize(phi(hermitize(X)))


def _require_subunital(phi, tol, unital=False):
    kind = classify_unitality(phi, tol)
    allowed = (Unitality.UNITAL,) if unital else (Unitality.UNITAL, Unitality.SUBUNITAL)
    if kind not in allowed:
        need = "unital" if unital else "unital or sub-unital"
        raise PreconditionError(f"map must be {need}, classified {kind.value}")
    return kind


def _loewner_report(case_id, X, Y, tol, **details):
    res = loewner_leq(X, Y, tol)
    return InequalityCheckReport(case_id, res.holds, res.gap, tolerances=tol, details=details)


def _dominance_report(case_id, L, R, tol, **details):
    """``lambda_j(L) <= lambda_j(R)`` for all j, plus a unitary witness when it holds."""
    res, j = eigenvalue_dominance(eigenvalues_desc(L, tol), eigenvalues_desc(R, tol), tol)
    details = dict(details, first_violation=None if res.holds else j)
    witness = None
    holds = res.holds
    if res.holds:
        try:
            witness = align_witness(L, R, tol)
        except DominanceError:
            holds = False
        else:
            holds = witness_verified(witness, res.scale, tol)
    return InequalityCheckReport(case_id, holds, res.gap, witness=witness, tolerances=tol, details=details)


def witness_verified(witness, scale, tol: ToleranceConfig = DEFAULT_TOL, slack=1e-9):
    """Kind invariant and certified inequality both within tolerance."""
    return witness.kind_ok(slack) and witness.residual >= -tol.tau_psd * scale


# ---------------------------------------------------------------------------
# powers under a positive map
# ---------------------------------------------------------------------------

def _images(phi, A, exponents, tol):
    return [_phi(phi, P) for P in powers(A, exponents, tol)]


def check_T11(phi, A, p, q, tol: ToleranceConfig = DEFAULT_TOL):
    """``|Phi(A^p) Phi(A^q)| <= Phi(A^{p+q})`` for ``0 <= p <= q``; also the sharper
    ``|Phi(A^p) Phi(A^q)| <= Phi(A^q)^{1+p/q}``."""
    p, q = float(p), float(q)
    if not 0.0 <= p <= q:
        raise PreconditionError(f"need 0 <= p <= q, got p={p}, q={q}")
    _require_subunital(phi, tol)
    X, Y, R = _images(phi, A, (p, q, p + q), tol)
    L = operator_abs(X @ Y, tol)
    main = loewner_leq(L, R, tol)
    details = {"p": p, "q": q, "main_gap": main.gap}
    holds, gap = main.holds, main.gap
    if q > 0:
        sharp = loewner_leq(L, frac_power(Y, 1.0 + p / q, tol), tol)
        details["ineq11_gap"] = sharp.gap
        holds = holds and sharp.holds
    if p > 0 and np.linalg.norm(R - L) <= tol.tau_id * max(1.0, np.linalg.norm(R)):
        # equality is expected to force Phi(A^t) = Phi(A)^t; only sampled t can be checked
        details["equality_case"] = True
        details["power_residual"] = equality_diagnostic(phi, A, tol=tol)
    return InequalityCheckReport("T1.1", holds, gap, tolerances=tol, details=details)


def equality_diagnostic(phi, A, ts=EQUALITY_SAMPLE_T, tol: ToleranceConfig = DEFAULT_TOL):
    """Largest relative ``||Phi(A^t) - Phi(A)^t||`` over the sampled ``t``.

    A diagnostic, not an invariant: a small value at finitely many ``t`` says
    nothing about the others.
    """
    PA = _phi(phi, A)
    worst = 0.0
    for t, At in zip(ts, powers(A, ts, tol)):
        img = _phi(phi, At)
        diff = np.linalg.norm(img - frac_power(PA, t, tol))
        worst = max(worst, float(diff / max(np.linalg.norm(img), np.finfo(float).tiny)))
    return worst


def check_ineq11(phi, A, p, q, tol: ToleranceConfig = DEFAULT_TOL):
    """``Phi(A^q)^{1+p/q} >= |Phi(A^p) Phi(A^q)|`` for ``0 <= p <= q``, ``q > 0``."""
    p, q = float(p), float(q)
    if not 0.0 <= p <= q or q == 0:
        raise PreconditionError(f"need 0 <= p <= q and q > 0, got p={p}, q={q}")
    _require_subunital(phi, tol)
    X, Y = _images(phi, A, (p, q), tol)
    L = operator_abs(X @ Y, tol)
    return _loewner_report("ineq1.1", L, frac_power(Y, 1.0 + p / q, tol), tol, p=p, q=q)


def check_C12(phi, A, p, q, tol: ToleranceConfig = DEFAULT_TOL):
    """``|Phi(A^p) Phi(A^q)| <= V Phi(A^{p+q}) V*`` for some unitary V, any ``p, q >= 0``."""
    p, q = float(p), float(q)
    X, Y, R = _images(phi, A, (p, q, p + q), tol)
    L = operator_abs(X @ Y, tol)
    return _dominance_report("C1.2", L, R, tol, p=p, q=q)


def check_P13(phi, A, p, q, r, tol: ToleranceConfig = DEFAULT_TOL):
    """Three-factor version under ``min(p, r) <= q/2`` and ``max(p, r) <= q``."""
    p, q, r = float(p), float(q), float(r)
    if min(p, q, r) < 0 or min(p, r) > q / 2.0 or max(p, r) > q:
        raise PreconditionError(f"exponents (p, q, r) = ({p}, {q}, {r}) outside the admissible region")
    X, Y, Z, R = _images(phi, A, (p, q, r, p + q + r), tol)
    L = operator_abs(X @ Y @ Z, tol)
    return _dominance_report("P1.3", L, R, tol, p=p, q=q, r=r)


def check_P14(phi, A, p, q, r, tol: ToleranceConfig = DEFAULT_TOL):
    """Ky Fan consequence of the two-unitary average bound (``q >= p, r``)."""
    p, q, r = float(p), float(q), float(r)
    if min(p, q, r) < 0 or q < p or q < r:
        raise PreconditionError(f"need q >= p, r >= 0, got ({p}, {q}, {r})")
    X, Y, Z, R = _images(phi, A, (p, q, r, p + q + r), tol)
    L = operator_abs(X @ Y @ Z, tol)
    holds, gap = weakly_majorizes(eigenvalues_desc(L, tol), eigenvalues_desc(R, tol), tol)
    return InequalityCheckReport("P1.4", holds, gap, tolerances=tol, details={"p": p, "q": q, "r": r})


def check_BK(X, Y, tol: ToleranceConfig = DEFAULT_TOL):
    """``|X Y*| <= U (|X|^2 + |Y|^2)/2 U*`` for some unitary U."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    L = operator_abs(X @ Y.conj().T, tol)
    R = hermitize((X.conj().T @ X + Y.conj().T @ Y) / 2.0)
    return _dominance_report("BK", L, R, tol)


def check_kadison(phi, A, tol: ToleranceConfig = DEFAULT_TOL):
    """``Phi(A)^2 <= Phi(A^2)`` for Hermitian A and sub-unital Phi."""
    _require_subunital(phi, tol)
    A = hermitize(A)
    X = _phi(phi, A)
    return _loewner_report("kadison", X @ X, _phi(phi, A @ A), tol)


def check_choi_low(phi, A, p, tol: ToleranceConfig = DEFAULT_TOL):
    """``Phi(A^p) <= Phi(A)^p`` for ``0 <= p <= 1``."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"need 0 <= p <= 1, got {p}")
    _require_subunital(phi, tol, unital=True)
    X, Xp = _images(phi, A, (1.0, p), tol)
    return _loewner_report("choi-low", Xp, frac_power(X, p, tol), tol, p=p)


def check_choi_high(phi, A, p, tol: ToleranceConfig = DEFAULT_TOL):
    """``Phi(A)^p <= Phi(A^p)`` for ``1 <= p <= 2``."""
    p = float(p)
    if not 1.0 <= p <= 2.0:
        raise PreconditionError(f"need 1 <= p <= 2, got {p}")
    _require_subunital(phi, tol, unital=True)
    X, Xp = _images(phi, A, (1.0, p), tol)
    return _loewner_report("choi-high", frac_power(X, p, tol), Xp, tol, p=p)


# ---------------------------------------------------------------------------
# the counterexample showing the unitary cannot be dropped
# ---------------------------------------------------------------------------

def unitary_free_gap(eps, p, q, tol: ToleranceConfig = DEFAULT_TOL):
    """Smallest eigenvalue of ``Phi(A^{p+q}) - |Phi(A^p)Phi(A^q)|`` for the Schur map with the fixed symbol."""
    phi = SchurMultiplier(COUNTEREXAMPLE_SYMBOL)
    A = perturbed_diagonal(eps)
    X, Y, R = _images(phi, A, (p, q, p + q), tol)
    L = operator_abs(X @ Y, tol)
    return float(eigenvalues_desc(R - L, tol)[-1]), L, R


def refine_unitary_free_gap(eps, p, q, dps=40):
    """Recompute :func:`unitary_free_gap` in ``dps``-digit arithmetic (mpmath), independent of the kernel."""
    import mpmath

    with mpmath.workdps(dps):
        mp = mpmath.mp
        # entries of A(eps) are taken as the exact binary values of the float matrix
        A = mp.matrix(perturbed_diagonal(eps).real.tolist())
        Bs = mp.matrix(COUNTEREXAMPLE_SYMBOL.real.tolist())

        def power(M, t):
            w, Q = mp.eigsy(M)
            D = mp.diag([mp.power(max(w[i], mp.mpf(0)), t) for i in range(M.rows)])
            return Q * D * Q.T

        def schur(M):
            return mp.matrix([[Bs[i, j] * M[i, j] for j in range(M.cols)] for i in range(M.rows)])

        X = schur(power(A, mp.mpf(p)))
        Y = schur(power(A, mp.mpf(q)))
        R = schur(power(A, mp.mpf(p) + mp.mpf(q)))
        XY = X * Y
        L = power(XY.T * XY, mp.mpf(1) / 2)
        D = R - L
        D = (D + D.T) / 2
        w, _ = mp.eigsy(D)
        return float(min(w[i] for i in range(D.rows)))


def search_unitary_counterexample(p_grid=COUNTEREXAMPLE_P_GRID, q_grid=COUNTEREXAMPLE_Q_GRID, eps_grid=COUNTEREXAMPLE_EPS_GRID,
                                 tol: ToleranceConfig = DEFAULT_TOL, refine=True):
    """Grid search for an instance where the plain Loewner form (no unitary) fails.

    Only pairs with ``q < p`` are searched.  Success needs a gap below
    ``-10 tau_psd`` while the eigenvalue-dominance form still holds on the same
    instance; otherwise :class:`SearchExhausted` carries the best result.
    """
    best = None
    for eps in eps_grid:
        for p in p_grid:
            for q in q_grid:
                if not 0 < q < p:
                    continue
                gap, L, R = unitary_free_gap(eps, p, q, tol)
                if best is None or gap < best["gap"]:
                    best = {"eps": float(eps), "p": float(p), "q": float(q), "gap": gap}
    if best is None:
        raise SearchExhausted("empty search grid")
    phi = SchurMultiplier(COUNTEREXAMPLE_SYMBOL)
    A = perturbed_diagonal(best["eps"])
    dominance = check_C12(phi, A, best["p"], best["q"], tol)
    best["dominance_holds"] = bool(dominance.holds)
    best["dominance_gap"] = dominance.gap
    best["A"] = A
    best["B"] = COUNTEREXAMPLE_SYMBOL.copy()
    target = -10.0 * tol.tau_psd
    if refine:
        best["refined_gap"] = refine_unitary_free_gap(best["eps"], best["p"], best["q"])
        best["sign_stable"] = bool((best["refined_gap"] < 0) == (best["gap"] < 0))
    found = best["gap"] < target and best["dominance_holds"] and best.get("sign_stable", True)
    # the report describes the plain (unitary-free) inequality, so success shows up as a violation
    best["counterexample_found"] = bool(found)
    report = InequalityCheckReport(
        "no-unitary",
        not found,
        best["gap"],
        witness=dominance.witness,
        tolerances=tol,
        details={k: v for k, v in best.items() if k not in ("A", "B")},
        asserted=False,
    )
    if not found:
        raise SearchExhausted(f"no violation below {target:g} (best gap {best['gap']:.3g})", best=best)
    return best, report


# ---------------------------------------------------------------------------
# monotone pairs
# ---------------------------------------------------------------------------

def _require_projection(E):
    if not is_projection(E, 1e-10):
        raise PreconditionError("E must be an orthogonal projection")
    return hermitize(E)


def check_T21(pair: MonotonePair, E, tol: ToleranceConfig = DEFAULT_TOL, case_id="T2.1"):
    """``sigma_j(AEB) <= sigma_j(ABE)``, i.e. ``|AEB| <= V|ABE|V*``."""
    E = _require_projection(E)
    A, B = pair.A, pair.B
    AEB = A @ E @ B
    ABE = A @ B @ E
    sl = singular_values_desc(AEB, tol)
    sr = singular_values_desc(ABE, tol)
    res, j = eigenvalue_dominance(sl, sr, tol)
    witness = None
    holds = res.holds
    if res.holds:
        witness = align_witness(operator_abs(AEB, tol), operator_abs(ABE, tol), tol)
        holds = witness_verified(witness, res.scale, tol)
    return InequalityCheckReport(
        case_id, holds, res.gap, witness=witness, tolerances=tol,
        details={"first_violation": None if res.holds else j},
    )


def check_eq21(pair: MonotonePair, E, tol: ToleranceConfig = DEFAULT_TOL, which="both"):
    """Compression eigenvalue inequalities.

    ``a``: ``lambda_j[(EAE)(EBE)] <= lambda_j[EABE]``;
    ``b``: ``lambda_j[(EAE)(EBE)(EAE)] <= lambda_j[EABAE]``.
    """
    E = _require_projection(E)
    A, B = pair.A, pair.B
    EAE = hermitize(E @ A @ E)
    EBE = hermitize(E @ B @ E)
    details = {}
    results = []
    if which in ("a", "both"):
        left = psd_product_eigenvalues(EAE, EBE, tol)
        right = eigenvalues_desc(hermitize(E @ A @ B @ E), tol)
        res, _ = eigenvalue_dominance(left, right, tol)
        details["a_gap"] = res.gap
        results.append(res)
    if which in ("b", "both"):
        left = eigenvalues_desc(hermitize(EAE @ EBE @ EAE), tol)
        right = eigenvalues_desc(hermitize(E @ A @ B @ A @ E), tol)
        res, _ = eigenvalue_dominance(left, right, tol)
        details["b_gap"] = res.gap
        results.append(res)
    case_id = {"a": "eq2.1a", "b": "eq2.1b"}.get(which, "eq2.1")
    return InequalityCheckReport(
        case_id,
        all(r.holds for r in results),
        min(r.gap for r in results),
        tolerances=tol,
        details=details,
    )


def check_C22(phi, pair: MonotonePair, tol: ToleranceConfig = DEFAULT_TOL, check_pair=True):
    """``Phi(A)Phi(B)Phi(A) <= V Phi(ABA) V*`` (unital: C2.2, sub-unital: C2.2a)."""
    kind = _require_subunital(phi, tol)
    info = {}
    if check_pair and not is_monotone_pair(pair.A, pair.B, tol, info):
        raise PreconditionError("not a monotone pair")
    X = _phi(phi, pair.A)
    Y = _phi(phi, pair.B)
    L = hermitize(X @ Y @ X)
    R = _phi(phi, pair.A @ pair.B @ pair.A)
    case_id = "C2.2" if kind == Unitality.UNITAL else "C2.2a"
    return _dominance_report(case_id, L, R, tol, joint_spectrum_fallback=info.get("used_fallback", False))


def _pinv_sqrt(P, tol):
    ed = eig_hermitian(P, tol)
    w = np.maximum(ed.values, 0.0)
    cut = PSEUDO_INVERSE_RTOL * max(float(w[0]), np.finfo(float).tiny)
    inv = np.where(w > cut, 1.0 / np.sqrt(np.where(w > cut, w, 1.0)), 0.0)
    return hermitize((ed.vectors * inv) @ ed.vectors.conj().T), hermitize((ed.vectors * np.sqrt(w)) @ ed.vectors.conj().T)


def factorize_T23(phi, pair: MonotonePair, tol: ToleranceConfig = DEFAULT_TOL, check_pair=True):
    """``Phi(B)Phi(A) = sqrt(P) K sqrt(P) U`` with ``P = Phi(AB)``, ``K`` a contraction, ``U`` unitary.

    ``U`` comes from the unitary of the C2.2 step applied to the monotone pair
    ``(A, B A^{-1})``: ``Phi(A)Phi(BA^{-1})Phi(A) <= U* P U``.  Returns
    ``(K, U, report)``.
    """
    _require_subunital(phi, tol, unital=True)
    A, B = pair.A, pair.B
    info = {}
    if check_pair and not is_concave_pair(A, B, tol, info):
        raise PreconditionError("factorization needs a concave monotone pair")
    require_strictly_positive(A, tol)
    PA = _phi(phi, A)
    PB = _phi(phi, B)
    BAinv = hermitize(B @ frac_power(A, -1.0, tol))
    P = _phi(phi, A @ B)
    X = hermitize(PA @ _phi(phi, BAinv) @ PA)
    step = align_witness(X, P, tol)  # DominanceError would falsify the chain
    U = step.matrix.conj().T
    P_isqrt, P_sqrt = _pinv_sqrt(P, tol)
    M = PB @ PA
    K = P_isqrt @ M @ U.conj().T @ P_isqrt
    recon = P_sqrt @ K @ P_sqrt @ U
    residual = float(np.linalg.norm(recon - M) / max(np.linalg.norm(M), np.finfo(float).tiny))
    k_norm = float(singular_values_desc(K, tol)[0])
    witness = WitnessCertificate("pair", (U, K), 1.0 - k_norm)
    holds = k_norm <= 1.0 + FACTOR_RTOL and residual <= FACTOR_RTOL and step.residual >= -tol.tau_psd * max(1.0, opnorm(P, tol))
    report = InequalityCheckReport(
        "T2.3",
        holds,
        1.0 - k_norm,
        witness=witness,
        tolerances=tol,
        details={"k_norm": k_norm, "reconstruction_residual": residual, "c22_step_gap": step.residual,
                 "joint_spectrum_fallback": info.get("used_fallback", False)},
    )
    return K, U, report


def _trace_norm(X, tol):
    return float(np.sum(singular_values_desc(X, tol)))


def check_C24_C25(phi, pair: MonotonePair, tol: ToleranceConfig = DEFAULT_TOL, exploratory=False):
    """Chebyshev-type bounds for concave pairs.

    C2.5: ``|Phi(A)Phi(B)|`` is weakly log-majorized by ``Phi(AB)``.
    C2.4: Ky Fan consequence, symmetric-norm bounds (operator, trace,
    Frobenius) and, when ``A`` is invertible, the explicit unitary ``V`` with
    ``2|Phi(A)Phi(B)| <= Phi(AB) + V Phi(AB) V*`` built from the T2.3 unitary
    and the polar factor of ``Phi(A)Phi(B)``.

    ``exploratory=True`` runs on pairs that are not concave and marks the report
    as not asserted.
    """
    _require_subunital(phi, tol, unital=True)
    info = {}
    concave = is_concave_pair(pair.A, pair.B, tol, info)
    if not concave and not exploratory:
        raise PreconditionError("C2.4/C2.5 need a concave monotone pair")
    PA = _phi(phi, pair.A)
    PB = _phi(phi, pair.B)
    M = PA @ PB
    L = operator_abs(M, tol)
    R = _phi(phi, pair.A @ pair.B)
    lam_l = eigenvalues_desc(L, tol)
    lam_r = eigenvalues_desc(R, tol)
    wlog = weak_log_majorizes(np.maximum(lam_l, 0.0), np.maximum(lam_r, 0.0), WLOG_RTOL)
    kf_holds, kf_gap = weakly_majorizes(lam_l, lam_r, tol)
    slack = tol.tau_psd * max(1.0, float(abs(lam_r[0])))
    norms = {
        "operator": (opnorm(M, tol), float(np.max(np.abs(lam_r)))),
        "trace": (_trace_norm(M, tol), float(np.sum(np.abs(lam_r)))),
        "frobenius": (float(np.linalg.norm(M)), float(np.linalg.norm(R))),
    }
    norms_hold = all(l <= r + slack * len(lam_r) for l, r in norms.values())
    details = {
        "concave": concave,
        "joint_spectrum_fallback": info.get("used_fallback", False),
        "wlog": wlog,
        "wlog_margin": log_majorization_margin(np.maximum(lam_l, 0.0), np.maximum(lam_r, 0.0)),
        "kyfan_gap": kf_gap,
        "norms": {k: list(v) for k, v in norms.items()},
    }
    witness = None
    witness_ok = True
    if concave:
        try:
            _, U, frep = factorize_T23(phi, pair, tol, check_pair=False)
        except (SingularError, DominanceError):
            frep = None
        if frep is not None:
            W, _ = polar_decompose(M, tol, unitary=True)
            V = W.conj().T @ U.conj().T
            res = loewner_leq(L, (R + V @ R @ V.conj().T) / 2.0, tol)
            witness = WitnessCertificate("unitary", (V,), res.gap)
            witness_ok = witness_verified(witness, res.scale, tol)
            details["c24_witness_gap"] = res.gap
    details["c24_holds"] = bool(kf_holds and norms_hold and witness_ok)
    details["c25_holds"] = bool(wlog)
    holds = wlog and kf_holds and norms_hold and witness_ok
    return InequalityCheckReport(
        "C2.4/C2.5" if concave else "C2.4/C2.5-explore",
        holds,
        kf_gap,
        witness=witness,
        tolerances=tol,
        details=details,
        asserted=concave,
    )


def check_C24(phi, pair, tol: ToleranceConfig = DEFAULT_TOL):
    rep = check_C24_C25(phi, pair, tol)
    rep.case_id = "C2.4"
    rep.holds = rep.details["c24_holds"]
    return rep


def check_C25(phi, pair, tol: ToleranceConfig = DEFAULT_TOL):
    rep = check_C24_C25(phi, pair, tol)
    rep.case_id = "C2.5"
    rep.holds = rep.details["c25_holds"]
    rep.gap = rep.details["wlog_margin"]
    rep.witness = None
    return rep


def check_P26(phi, A, p, q, tol: ToleranceConfig = DEFAULT_TOL):
    """``lambda_j[Phi(A^p)] lambda_j[Phi(A^q)] <= lambda_j[Phi(A^{p+q})]`` for all j.

    The ``j = 1`` case is cross-checked through the operator-norm Young/Jensen
    route.
    """
    p, q = float(p), float(q)
    if p < 0 or q < 0:
        raise PreconditionError("need p, q >= 0")
    _require_subunital(phi, tol, unital=True)
    X, Y, R = _images(phi, A, (p, q, p + q), tol)
    lx, ly, lr = (eigenvalues_desc(M, tol) for M in (X, Y, R))
    res, j = eigenvalue_dominance(lx * ly, lr, tol)
    details = {"p": p, "q": q, "first_violation": None if res.holds else j}
    holds = res.holds
    if p > 0 and q > 0:
        x, y, z = lx[0], ly[0], lr[0]
        young = p / (p + q) * x ** ((p + q) / p) + q / (p + q) * y ** ((p + q) / q)
        slack = tol.tau_psd * max(1.0, z, young)
        details["young_bound"] = young
        details["norm_route_gap"] = z - young
        holds = holds and x * y <= young + slack and young <= z + slack
    return InequalityCheckReport("P2.6", holds, res.gap, tolerances=tol, details=details)


def check_triangle_28(A, B, tol: ToleranceConfig = DEFAULT_TOL):
    """``|A+B| <= (|A| + |B| + V*(|A*| + |B*|)V)/2`` with V the polar partial isometry of A+B."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    S = A + B
    V, absS = polar_decompose(S, tol)
    absA, absB = operator_abs(A, tol), operator_abs(B, tol)
    absAs, absBs = operator_abs(A.conj().T, tol), operator_abs(B.conj().T, tol)
    R = (absA + absB + V.conj().T @ (absAs + absBs) @ V) / 2.0
    res = loewner_leq(absS, R, tol)
    witness = WitnessCertificate("partial_isometry", (V,), res.gap)
    tn = (_trace_norm(S, tol), _trace_norm(A, tol) + _trace_norm(B, tol))
    tn_ok = tn[0] <= tn[1] + tol.tau_psd * max(1.0, tn[1])
    holds = res.holds and tn_ok and witness.kind_ok()
    return InequalityCheckReport(
        "tri2.8", holds, res.gap, witness=witness, tolerances=tol,
        details={"trace_norm_sum": tn[0], "trace_norm_parts": tn[1]},
    )


def check_dilation(Z, X, tol: ToleranceConfig = DEFAULT_TOL):
    """``E`` is a projection and the top-left block of ``E diag(X, 0) E`` equals ``Z X Z``."""
    from .posmaps import dilation_projection

    E = dilation_projection(Z, tol)
    n = Z.shape[0]
    idem = float(np.linalg.norm(E @ E - E))
    X0 = np.zeros((2 * n, 2 * n), dtype=complex)
    X0[:n, :n] = X
    block = (E @ X0 @ E)[:n, :n]
    comp = float(np.linalg.norm(block - Z @ X @ Z))
    worst = max(idem, comp)
    return InequalityCheckReport(
        "dilation", worst <= 1e-9, 1e-9 - worst, tolerances=tol,
        details={"idempotence_residual": idem, "compression_residual": comp},
    )
