"""Case registry and the randomized trial runner.

Every trial draws its instance from ``stream(seed, case_id, dim, trial)`` so a
record can be replayed from its digest alone, independent of scheduling.
"""
import datetime
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Tuple

from . import means, pairs, posmaps, verify
from . import rng as R
from .errors import NumericFailure, OpineqError, SearchExhausted
from .report import InequalityCheckReport
from .tolerance import DEFAULT_TOL, ToleranceConfig

SUITE_MAP_KINDS = ("compression", "schur", "pinching", "congruence")
UNITAL_MAP_KINDS = ("compression", "schur", "pinching", "mixture")


@dataclass
class Case:
    case_id: str
    run: Callable
    asserted: bool = True
    description: str = ""
    single: bool = False  # deterministic search, run once regardless of dims/trials
    expect_violation: bool = False  # negative control


@dataclass
class RunConfig:
    seed: int = 0
    dims: Tuple[int, ...] = (2, 3, 4, 5, 6)
    trials: int = 200
    tol: ToleranceConfig = DEFAULT_TOL
    cases: Tuple[str, ...] = ("all",)
    output: str = "text"
    overrides: dict = field(default_factory=dict)  # exponent values, optionally a fixed "map"
    jobs: int = 1
    timestamp: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.dims or any(not 1 <= d <= 64 for d in self.dims):
            raise ValueError("dims must each lie in [1, 64]")
        if self.output not in ("text", "json", "csv"):
            raise ValueError(f"unknown output format {self.output!r}")


# ---------------------------------------------------------------------------
# instance helpers
# ---------------------------------------------------------------------------

def _map(g, n, kinds=SUITE_MAP_KINDS, ov=None):
    kind = g.choice(kinds)
    out = g.integer(1, n + 1) if kind == "compression" else n
    phi = posmaps.random_map(kind, n, out, g)
    # a user-supplied map replaces the draw; the stream advances the same way
    return ov["map"] if ov and "map" in ov else phi


def _map_digest(phi):
    return {"map": phi.kind, "map_hash": phi.digest()}


def _ordered_exponents(g, ov, hi=3.0):
    a, b = g.uniform_range(0.0, hi), g.uniform_range(0.0, hi)
    p, q = min(a, b), max(a, b)
    return ov.get("p", p), ov.get("q", q)


def _pair(g, n, concave):
    return pairs.random_monotone_pair(n, g, concave=concave)


def _projection(g, n):
    return R.random_projection(n, g.integer(1, n + 1), g)


# ---------------------------------------------------------------------------
# case runners: (g, n, ov, tol) -> (report, digest extras)
# ---------------------------------------------------------------------------

def _t11(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    A = R.random_psd(n, g)
    p, q = _ordered_exponents(g, ov)
    return verify.check_T11(phi, A, p, q, tol), {"exponents": {"p": p, "q": q}, **_map_digest(phi)}


def _ineq11(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    A = R.random_psd(n, g)
    p, q = _ordered_exponents(g, ov)
    q = max(q, 1e-3)
    return verify.check_ineq11(phi, A, p, q, tol), {"exponents": {"p": p, "q": q}, **_map_digest(phi)}


def _c12(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    A = R.random_psd(n, g)
    p, q = ov.get("p", g.uniform_range(0, 3)), ov.get("q", g.uniform_range(0, 3))
    return verify.check_C12(phi, A, p, q, tol), {"exponents": {"p": p, "q": q}, **_map_digest(phi)}


def _p13(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    A = R.random_psd(n, g)
    q = g.uniform_range(0.05, 3.0)
    small = g.uniform_range(0.0, q / 2.0)
    big = g.uniform_range(0.0, q)
    p, r = (small, big) if g.uniform() < 0.5 else (big, small)
    p, q, r = ov.get("p", p), ov.get("q", q), ov.get("r", r)
    return verify.check_P13(phi, A, p, q, r, tol), {"exponents": {"p": p, "q": q, "r": r}, **_map_digest(phi)}


def _p14(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    A = R.random_psd(n, g)
    q = g.uniform_range(0.0, 3.0)
    p, r = g.uniform_range(0.0, q), g.uniform_range(0.0, q)
    p, q, r = ov.get("p", p), ov.get("q", q), ov.get("r", r)
    return verify.check_P14(phi, A, p, q, r, tol), {"exponents": {"p": p, "q": q, "r": r}, **_map_digest(phi)}


def _bk(g, n, ov, tol):
    return verify.check_BK(R.random_complex(n, g), R.random_complex(n, g), tol), {}


def _kadison(g, n, ov, tol):
    phi = _map(g, n, ov=ov)
    return verify.check_kadison(phi, R.random_hermitian(n, g), tol), _map_digest(phi)


def _choi_low(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    p = ov.get("p", g.uniform())
    return verify.check_choi_low(phi, R.random_psd(n, g), p, tol), {"exponents": {"p": p}, **_map_digest(phi)}


def _choi_high(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    p = ov.get("p", 1.0 + g.uniform())
    return verify.check_choi_high(phi, R.random_psd(n, g), p, tol), {"exponents": {"p": p}, **_map_digest(phi)}


def _t21(g, n, ov, tol):
    pair = _pair(g, n, concave=g.uniform() < 0.5)
    return verify.check_T21(pair, _projection(g, n), tol), {}


def _t21_anti(g, n, ov, tol):
    pair = pairs.random_antimonotone_pair(n, g)
    return verify.check_T21(pair, _projection(g, n), tol, case_id="T2.1-anti"), {}


def _eq21a(g, n, ov, tol):
    pair = _pair(g, n, concave=g.uniform() < 0.5)
    return verify.check_eq21(pair, _projection(g, n), tol, which="a"), {}


def _eq21b(g, n, ov, tol):
    pair = _pair(g, n, concave=g.uniform() < 0.5)
    return verify.check_eq21(pair, _projection(g, n), tol, which="b"), {}


def _c22(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    pair = _pair(g, n, concave=g.uniform() < 0.5)
    return verify.check_C22(phi, pair, tol), _map_digest(phi)


def _c22a(g, n, ov, tol):
    phi = _map(g, n, ("congruence",), ov)
    pair = _pair(g, n, concave=g.uniform() < 0.5)
    return verify.check_C22(phi, pair, tol), _map_digest(phi)


def _t23(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    pair = _pair(g, n, concave=True)
    return verify.factorize_T23(phi, pair, tol)[2], _map_digest(phi)


def _c24(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    return verify.check_C24(phi, _pair(g, n, concave=True), tol), _map_digest(phi)


def _c25(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    return verify.check_C25(phi, _pair(g, n, concave=True), tol), _map_digest(phi)


def _c24_explore(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    pair = _pair(g, n, concave=False)
    rep = verify.check_C24_C25(phi, pair, tol, exploratory=True)
    rep.case_id = "C2.4-explore"
    rep.asserted = False
    return rep, _map_digest(phi)


def _p26(g, n, ov, tol):
    phi = _map(g, n, UNITAL_MAP_KINDS, ov)
    p, q = ov.get("p", g.uniform_range(0, 3)), ov.get("q", g.uniform_range(0, 3))
    return verify.check_P26(phi, R.random_psd(n, g), p, q, tol), {"exponents": {"p": p, "q": q}, **_map_digest(phi)}


def _tri28(g, n, ov, tol):
    if g.uniform() < 0.2:
        A, B = R.random_psd(n, g), R.random_psd(n, g)
    else:
        A, B = R.random_complex(n, g), R.random_complex(n, g)
    return verify.check_triangle_28(A, B, tol), {}


def _ah31(g, n, ov, tol):
    A, B = R.random_psd(n, g), R.random_psd(n, g)
    alpha, s = ov.get("alpha", g.uniform()), ov.get("s", g.uniform_range(0.01, 0.99))
    return means.check_ando_hiai(A, B, alpha, s, tol), {"exponents": {"alpha": alpha, "s": s}}


def _reiteration(g, n, ov, tol):
    A, B = R.random_psd(n, g), R.random_psd(n, g)
    x, y, z = (ov.get(k, g.uniform()) for k in ("x", "y", "z"))
    return means.check_reiteration(A, B, x, y, z, tol), {"exponents": {"x": x, "y": y, "z": z}}


def _mean_congruence(g, n, ov, tol):
    A, B = R.random_psd(n, g), R.random_psd(n, g)
    alpha = ov.get("alpha", g.uniform())
    X = R.haar_unitary(n, g) * g.uniform_range(0.3, 2.0, n) @ R.haar_unitary(n, g)
    return means.check_congruence_axiom(A, B, alpha, X, tol), {"exponents": {"alpha": alpha}}


def _l32(g, n, ov, tol):
    A, B = R.random_ordered_pair(n, g)
    p, r = ov.get("p", g.uniform_range(0.05, 4.0)), ov.get("r", g.uniform_range(0.05, 3.0))
    return means.check_lemma32(A, B, p, r, tol), {"exponents": {"p": p, "r": r}}


def _l33(g, n, ov, tol):
    A, B = R.random_ordered_pair(n, g)
    p, r = ov.get("p", g.uniform_range(1.0, 4.0)), ov.get("r", g.uniform_range(0.05, 3.0))
    return means.check_lemma33(A, B, p, r, tol), {"exponents": {"p": p, "r": r}}


def _f34(g, n, ov, tol):
    A, B = R.random_ordered_pair(n, g, strict=False)
    p = g.choice(means.FURUTA_P_GRID)
    r = g.choice(means.FURUTA_R_GRID)
    mult = g.choice((1.0, 1.5))
    p, r = ov.get("p", p), ov.get("r", r)
    q = ov.get("q", mult * (p + r) / (1.0 + r))
    rep = means.check_furuta(A, B, means.FurutaParams(p, r, q), tol, wform=r > 0 or p > 0)
    return rep, {"exponents": {"p": p, "r": r, "q": q}}


def _kwong(g, n, ov, tol):
    A, B = R.random_ordered_pair(n, g, strict=False)
    rep = means.check_furuta(A, B, means.FurutaParams(2.0, 2.0, 2.0), tol, case_id="kwong")
    return rep, {"exponents": {"p": 2.0, "r": 2.0, "q": 2.0}}


def _f34_boundary(g, n, ov, tol):
    A, B = R.random_ordered_pair(n, g, strict=False)
    p = g.choice(means.FURUTA_P_GRID)
    r = g.choice(means.FURUTA_R_GRID)
    q = ov.get("factor", 0.9) * (p + r) / (1.0 + r)
    rep = means.check_furuta(A, B, means.FurutaParams(p, r, q), tol, enforce_region=False, case_id="F3.4-boundary")
    rep.asserted = False
    return rep, {"exponents": {"p": p, "r": r, "q": q}}


def _dilation(g, n, ov, tol):
    Z = R.random_positive_contraction(n, g)
    X = R.random_hermitian(n, g)
    return verify.check_dilation(Z, X, tol), {}


def _no_unitary(g, n, ov, tol):
    try:
        _, rep = verify.search_unitary_counterexample(tol=tol)
    except SearchExhausted as exc:
        best = {k: v for k, v in exc.best.items() if k not in ("A", "B")}
        best["counterexample_found"] = False
        rep = InequalityCheckReport("no-unitary", True, best["gap"], tolerances=tol, details=best, asserted=False)
    return rep, {}


CASES = {
    c.case_id: c
    for c in [
        Case("T1.1", _t11, description="|Phi(A^p)Phi(A^q)| <= Phi(A^{p+q}), p <= q"),
        Case("ineq1.1", _ineq11, description="|Phi(A^p)Phi(A^q)| <= Phi(A^q)^{1+p/q}"),
        Case("C1.2", _c12, description="unitary-congruence form, any p, q"),
        Case("P1.3", _p13, description="three factors, min(p,r) <= q/2, max(p,r) <= q"),
        Case("P1.4", _p14, description="three factors, Ky Fan consequence, q >= p, r"),
        Case("BK", _bk, description="|XY*| <= U (|X|^2+|Y|^2)/2 U*"),
        Case("T2.1", _t21, description="sigma(AEB) <= sigma(ABE) for monotone pairs"),
        Case("T2.1-anti", _t21_anti, asserted=False, expect_violation=True,
             description="negative control: anti-monotone pairs"),
        Case("eq2.1a", _eq21a, description="lambda[(EAE)(EBE)] <= lambda[EABE]"),
        Case("eq2.1b", _eq21b, description="lambda[(EAE)(EBE)(EAE)] <= lambda[EABAE]"),
        Case("C2.2", _c22, description="Phi(A)Phi(B)Phi(A) <= V Phi(ABA) V*, unital"),
        Case("C2.2a", _c22a, description="same for sub-unital congruences"),
        Case("T2.3", _t23, description="Phi(B)Phi(A) = sqrt(P) K sqrt(P) U"),
        Case("C2.4", _c24, description="|Phi(A)Phi(B)| <= (P + VPV*)/2 and norm bounds"),
        Case("C2.5", _c25, description="|Phi(A)Phi(B)| weakly log-majorized by Phi(AB)"),
        Case("C2.4-explore", _c24_explore, asserted=False, description="C2.4/C2.5 on non-concave pairs"),
        Case("P2.6", _p26, description="lambda_j products of power images"),
        Case("tri2.8", _tri28, description="|A+B| triangle inequality with partial isometry"),
        Case("kadison", _kadison, description="Phi(A)^2 <= Phi(A^2)"),
        Case("choi-low", _choi_low, description="Phi(A^p) <= Phi(A)^p, 0 <= p <= 1"),
        Case("choi-high", _choi_high, description="Phi(A)^p <= Phi(A^p), 1 <= p <= 2"),
        Case("dilation", _dilation, description="two-by-two dilation projection"),
        Case("AH3.1", _ah31, description="Ando-Hiai norm inequality"),
        Case("reiteration", _reiteration, description="reiteration identity of weighted means"),
        Case("mean-congruence", _mean_congruence, description="congruence invariance of the mean"),
        Case("L3.2", _l32, description="A^{-r} #_{r/(p+r)} B^p <= I"),
        Case("L3.3", _l33, description="A^{-r} #_{(1+r)/(p+r)} B^p <= B"),
        Case("F3.4", _f34, description="Furuta inequality on the exponent grid"),
        Case("kwong", _kwong, description="A^2 >= (A B^2 A)^{1/2}"),
        Case("F3.4-boundary", _f34_boundary, asserted=False,
             description="Furuta with q = 0.9 (p+r)/(1+r): sharpness evidence"),
        Case("no-unitary", _no_unitary, asserted=False, single=True, expect_violation=True,
             description="counterexample: the unitary cannot be dropped for q < p"),
    ]
}


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def run_trial(case_id, seed, dim, trial, tol: ToleranceConfig = DEFAULT_TOL, overrides=None):
    """Run one trial; returns the report (errors are turned into failing reports)."""
    case = CASES[case_id]
    g = R.stream(seed, case_id, dim, trial)
    digest = {"seed": int(seed), "case": case_id, "dim": int(dim), "trial": int(trial)}
    try:
        rep, extra = case.run(g, dim, dict(overrides or {}), tol)
    except NumericFailure as exc:
        rep, extra = InequalityCheckReport(case_id, False, float("nan"), tolerances=tol,
                                           details={"error": "NumericFailure", "message": str(exc)}), {}
    except OpineqError as exc:
        rep, extra = InequalityCheckReport(case_id, False, float("nan"), tolerances=tol,
                                           details={"error": type(exc).__name__, "message": str(exc)}), {}
    if rep.case_id != case_id:
        # e.g. a random congruence that happens to be unital reports as C2.2
        rep.details["reported_as"] = rep.case_id
        rep.case_id = case_id
    rep.asserted = rep.asserted and case.asserted
    rep.digest = {**digest, **extra}
    return rep


def _run_serialized(args):
    case_id, seed, dim, trial, tol, overrides = args
    return run_trial(case_id, seed, dim, trial, tol, overrides).to_dict()


def expand_cases(cases):
    if not cases or "all" in cases:
        return list(CASES)
    unknown = [c for c in cases if c not in CASES]
    if unknown:
        raise KeyError(", ".join(unknown))
    return list(cases)


def iter_tasks(config: RunConfig):
    for case_id in expand_cases(config.cases):
        case = CASES[case_id]
        dims = config.dims[:1] if case.single else config.dims
        trials = 1 if case.single else config.trials
        for dim in dims:
            for trial in range(trials):
                yield case_id, config.seed, dim, trial, config.tol, config.overrides


def run(config: RunConfig):
    """Run every task; records come back ordered by (case, dim, trial)."""
    tasks = list(iter_tasks(config))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_serialized, tasks, chunksize=max(1, len(tasks) // (8 * config.jobs))))
    else:
        records = [_run_serialized(t) for t in tasks]
    if config.timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        for rec in records:
            rec["timestamp"] = stamp
    return records


WITNESS_INVARIANT_SLACK = 1e-9
WITNESS_RESIDUAL_SLACK = 1e-8


def witness_record_ok(w):
    """Kind invariant within 1e-9 and the certified inequality re-verified within 1e-8."""
    return w["invariant_residual"] <= WITNESS_INVARIANT_SLACK and w["residual"] >= -WITNESS_RESIDUAL_SLACK


def summarize(records):
    """Per-case aggregate: trials, violations, min gap, witnesses verified."""
    out = {}
    for rec in records:
        s = out.setdefault(rec["case_id"], {
            "case_id": rec["case_id"], "trials": 0, "violations": 0, "errors": 0,
            "min_gap": None, "witnesses": 0, "witnesses_verified": 0, "asserted": rec["asserted"],
        })
        s["trials"] += 1
        if not rec["holds"]:
            s["violations"] += 1
        if "error" in rec["details"]:
            s["errors"] += 1
        gap = rec["gap"]
        if gap is not None and (s["min_gap"] is None or gap < s["min_gap"]):
            s["min_gap"] = gap
        w = rec.get("witness")
        if w is not None:
            s["witnesses"] += 1
            if witness_record_ok(w):
                s["witnesses_verified"] += 1
    return list(out.values())


def exit_code(records):
    """0 when every asserted check holds, 1 on a falsified check, 3 on numeric failure only."""
    failed = [r for r in records if r["asserted"] and not r["holds"]]
    if not failed:
        return 0
    if all(r["details"].get("error") == "NumericFailure" for r in failed):
        return 3
    return 1


def negative_controls(records):
    """For each negative-control case, whether at least one violation was produced."""
    seen = {}
    for rec in records:
        case = CASES.get(rec["case_id"])
        if case is not None and case.expect_violation:
            seen[rec["case_id"]] = seen.get(rec["case_id"], False) or not rec["holds"]
    return seen


def dumps_records(records):
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
