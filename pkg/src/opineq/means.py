"""Weighted geometric means and the order relations derived from them."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PreconditionError, SingularError
from .linalg import (
    as_psd,
    frac_power,
    hermitize,
    loewner_leq,
    opnorm,
    powers,
    require_strictly_positive,
    singular_values_desc,
)
from .report import InequalityCheckReport
from .tolerance import DEFAULT_TOL, ToleranceConfig

IDENTITY_RTOL = 1e-8
AH_RTOL = 1e-9
MAX_CONDITION = 1e8
RIDGE_FACTOR = 1e-8

FURUTA_P_GRID = (1.0, 1.5, 2.0, 3.0)
FURUTA_R_GRID = (0.0, 0.5, 1.0, 2.0)
FURUTA_Q_FACTORS = (0.9, 0.99, 1.0, 1.5)


def _weight(alpha, name="alpha"):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise PreconditionError(f"{name} must lie in [0, 1], got {alpha}")
    return alpha


@dataclass(frozen=True)
class FurutaParams:
    p: float
    r: float
    q: float
    s: Optional[float] = None

    @property
    def q_min(self):
        return (self.p + self.r) / (1.0 + self.r)

    @property
    def w(self):
        """Exponent (1 + r)/(p + r) of the optimal order-preserving form."""
        return (1.0 + self.r) / (self.p + self.r)

    def in_region(self):
        return self.p >= 1.0 and self.r >= 0.0 and self.q >= self.q_min * (1.0 - 1e-15)

    def validate(self):
        if self.p < 1.0:
            raise PreconditionError(f"Furuta needs p >= 1, got {self.p}")
        if self.r < 0.0:
            raise PreconditionError(f"Furuta needs r >= 0, got {self.r}")
        if not self.in_region():
            raise PreconditionError(f"q = {self.q} is below (p+r)/(1+r) = {self.q_min}")
        if self.s is not None and not 0.0 < self.s < 1.0:
            raise PreconditionError(f"Ando-Hiai power must lie in (0, 1), got {self.s}")
        return self


def ridge(A, factor=RIDGE_FACTOR, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(A + eps I, eps)`` with ``eps = factor * ||A||``."""
    A = hermitize(A)
    eps = factor * max(opnorm(A, tol), np.finfo(float).tiny)
    return A + eps * np.eye(A.shape[0]), eps


def geometric_mean(A, B, alpha, tol: ToleranceConfig = DEFAULT_TOL):
    """``A #_alpha B = A^{1/2} (A^{-1/2} B A^{-1/2})^alpha A^{1/2}`` for ``A > 0``, ``B >= 0``."""
    alpha = _weight(alpha)
    require_strictly_positive(A, tol)
    a_half, a_mhalf = powers(A, (0.5, -0.5), tol)
    middle = hermitize(a_mhalf @ hermitize(B) @ a_mhalf)
    return hermitize(a_half @ frac_power(middle, alpha, tol) @ a_half)


def _rel_residual(X, Y):
    return float(np.linalg.norm(X - Y) / max(np.linalg.norm(Y), np.finfo(float).tiny))


def check_congruence_axiom(A, B, alpha, X, tol: ToleranceConfig = DEFAULT_TOL):
    """``(X*AX) #_a (X*BX) = X*(A #_a B)X`` for invertible ``X``."""
    s = singular_values_desc(X, tol)
    if s[-1] <= 0.0 or s[0] / s[-1] > MAX_CONDITION:
        raise SingularError("congruence matrix is numerically singular")
    Xh = np.asarray(X, dtype=complex).conj().T
    lhs = geometric_mean(hermitize(Xh @ A @ X), hermitize(Xh @ B @ X), alpha, tol)
    rhs = hermitize(Xh @ geometric_mean(A, B, alpha, tol) @ X)
    res = _rel_residual(lhs, rhs)
    return InequalityCheckReport(
        "mean-congruence",
        res <= IDENTITY_RTOL,
        IDENTITY_RTOL - res,
        tolerances=tol,
        details={"residual": res, "condition": float(s[0] / s[-1])},
    )


def check_reiteration(A, B, x, y, z, tol: ToleranceConfig = DEFAULT_TOL):
    """``(A #_x B) #_z (A #_y B) = A #_{x(1-z)+yz} B``."""
    x, y, z = _weight(x, "x"), _weight(y, "y"), _weight(z, "z")
    require_strictly_positive(B, tol, "B")
    lhs = geometric_mean(geometric_mean(A, B, x, tol), geometric_mean(A, B, y, tol), z, tol)
    rhs = geometric_mean(A, B, x * (1.0 - z) + y * z, tol)
    res = _rel_residual(lhs, rhs)
    return InequalityCheckReport(
        "reiteration",
        res <= IDENTITY_RTOL,
        IDENTITY_RTOL - res,
        tolerances=tol,
        details={"residual": res, "x": x, "y": y, "z": z},
    )


def check_ando_hiai(A, B, alpha, s, tol: ToleranceConfig = DEFAULT_TOL):
    """``||(A #_a B)^s|| <= ||A^s #_a B^s||`` for ``0 < s < 1``."""
    s = float(s)
    if not 0.0 < s < 1.0:
        raise PreconditionError(f"s must lie in (0, 1), got {s}")
    require_strictly_positive(B, tol, "B")
    left = opnorm(frac_power(geometric_mean(A, B, alpha, tol), s, tol), tol)
    right = opnorm(geometric_mean(frac_power(A, s, tol), frac_power(B, s, tol), alpha, tol), tol)
    return InequalityCheckReport(
        "AH3.1",
        left <= right * (1.0 + AH_RTOL),
        right - left,
        tolerances=tol,
        details={"left_norm": left, "right_norm": right, "alpha": alpha, "s": s},
    )


def _require_ordered(A, B, tol):
    order = loewner_leq(B, A, tol)
    if not order.holds:
        raise PreconditionError(f"A >= B fails (gap {order.gap:.3g})")
    return order


def check_lemma32(A, B, p, r, tol: ToleranceConfig = DEFAULT_TOL):
    """``A >= B > 0``, ``p, r > 0``  =>  ``A^{-r} #_{r/(p+r)} B^p <= I``."""
    p, r = float(p), float(r)
    if p <= 0 or r <= 0:
        raise PreconditionError("lemma needs p, r > 0")
    _require_ordered(A, B, tol)
    require_strictly_positive(A, tol)
    M = geometric_mean(frac_power(A, -r, tol), frac_power(B, p, tol), r / (p + r), tol)
    res = loewner_leq(M, np.eye(M.shape[0]), tol)
    return InequalityCheckReport("L3.2", res.holds, res.gap, tolerances=tol, details={"p": p, "r": r})


def check_lemma33(A, B, p, r, tol: ToleranceConfig = DEFAULT_TOL):
    """``A >= B > 0``, ``r > 0``, ``p >= 1``  =>  ``A^{-r} #_{(1+r)/(p+r)} B^p <= B <= A``."""
    p, r = float(p), float(r)
    if p < 1 or r <= 0:
        raise PreconditionError("lemma needs p >= 1 and r > 0")
    order = _require_ordered(A, B, tol)
    require_strictly_positive(A, tol)
    M = geometric_mean(frac_power(A, -r, tol), frac_power(B, p, tol), (1.0 + r) / (p + r), tol)
    res = loewner_leq(M, B, tol)
    return InequalityCheckReport(
        "L3.3",
        res.holds and order.holds,
        min(res.gap, order.gap),
        tolerances=tol,
        details={"p": p, "r": r, "mean_le_B_gap": res.gap, "B_le_A_gap": order.gap},
    )


def check_mean_lemmas(A, B, p, r, tol: ToleranceConfig = DEFAULT_TOL):
    """Both Fujii-Kamei lemmas; the second only when ``p >= 1``."""
    first = check_lemma32(A, B, p, r, tol)
    details = {"lemma32_gap": first.gap, "p": float(p), "r": float(r)}
    holds, gap = first.holds, first.gap
    if p >= 1:
        second = check_lemma33(A, B, p, r, tol)
        details["lemma33_gap"] = second.gap
        holds, gap = holds and second.holds, min(gap, second.gap)
    return InequalityCheckReport("L3.2/L3.3", holds, gap, tolerances=tol, details=details)


def furuta_sides(A, B, p, r, q, tol: ToleranceConfig = DEFAULT_TOL):
    """``(A^{(p+r)/q}, (A^{r/2} B^p A^{r/2})^{1/q})``."""
    a_half_r, a_big = powers(A, (r / 2.0, (p + r) / q), tol)
    middle = hermitize(a_half_r @ frac_power(B, p, tol) @ a_half_r)
    return a_big, frac_power(middle, 1.0 / q, tol), middle


def check_furuta(A, B, params: FurutaParams, tol: ToleranceConfig = DEFAULT_TOL, wform=False,
                 use_ridge=False, enforce_region=True, case_id="F3.4"):
    """Furuta's order-preserving inequality for ``A >= B >= 0``.

    With ``enforce_region=False`` the exponent constraint is not checked, which
    is how boundary-sharpness searches call it.
    """
    if enforce_region:
        params.validate()
    p, r, q = float(params.p), float(params.r), float(params.q)
    details = {"p": p, "r": r, "q": q, "q_min": params.q_min}
    if use_ridge:
        A, eps = ridge(A, tol=tol)
        details["ridge_eps"] = eps
    A = as_psd(A, tol)
    B = as_psd(B, tol)
    _require_ordered(A, B, tol)
    lhs, rhs, middle = furuta_sides(A, B, p, r, q, tol)
    res = loewner_leq(rhs, lhs, tol)
    holds, gap = res.holds, res.gap
    if wform and p + r > 0:
        w = params.w
        wres = loewner_leq(frac_power(middle, w, tol), frac_power(A, 1.0 + r, tol), tol)
        details["wform_gap"] = wres.gap
        holds, gap = holds and wres.holds, min(gap, wres.gap)
    return InequalityCheckReport(case_id, holds, gap, tolerances=tol, details=details)


def furuta_boundary_search(rng, samples=10_000, dim=2, factor=0.9, tol: ToleranceConfig = DEFAULT_TOL,
                           p_grid=FURUTA_P_GRID, r_grid=FURUTA_R_GRID):
    """Look for ``A >= B`` violating Furuta with ``q = factor * (p+r)/(1+r)``.

    Cycles through the (p, r) grid.  Returns a dict with the number of
    violations, the most negative gap and the instance achieving it.
    """
    from .rng import random_ordered_pair

    grid = [(p, r) for p in p_grid for r in r_grid]
    best = None
    violations = 0
    for i in range(samples):
        p, r = grid[i % len(grid)]
        q = factor * (p + r) / (1.0 + r)
        A, B = random_ordered_pair(dim, rng, strict=False)
        rep = check_furuta(A, B, FurutaParams(p, r, q), tol, enforce_region=False, case_id="F3.4-boundary")
        if not rep.holds:
            violations += 1
        if best is None or rep.gap < best["gap"]:
            best = {"gap": rep.gap, "p": p, "r": r, "q": q, "A": A, "B": B, "sample": i}
    return {"violations": violations, "samples": samples, "factor": factor, "best": best}
