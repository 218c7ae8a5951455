"""Command-line interface: ``opineq {check,suite,mean,counterexample,eig,boundary}``.

Exit codes: 0 success, 1 an asserted inequality was falsified, 2 usage or parse
error, 3 numeric failure or singular input, 4 a search found nothing.
Defaults for the common flags can be set with ``OPINEQ_*`` environment
variables (``OPINEQ_SEED``, ``OPINEQ_DIMS``, ``OPINEQ_TRIALS``, ``OPINEQ_TOL``,
``OPINEQ_FORMAT``, ``OPINEQ_JOBS``).
"""
import argparse
import csv
import io
import json
import os
import sys

from . import harness, linalg, means, posmaps, verify
from .errors import NumericFailure, OpineqError, SearchExhausted, SingularError
from .matrix_io import dumps_matrix, load_matrix, matrix_from_json, matrix_to_json
from .report import CSV_FIELDS, report_csv_row
from .rng import stream
from .tolerance import DEFAULT_TOL

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_NUMERIC, EXIT_EXHAUSTED = 0, 1, 2, 3, 4
ENV_PREFIX = "OPINEQ_"
EXPONENT_FLAGS = ("p", "q", "r", "alpha", "s", "x", "y", "z")


class UsageError(Exception):
    pass


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name, default)


def parse_dims(text):
    """``"2..6"``, ``"2,3,5"`` or ``"4"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = tuple(range(int(lo), int(hi) + 1))
        else:
            dims = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dims {text!r}")
    if not dims or any(not 1 <= d <= 64 for d in dims):
        raise argparse.ArgumentTypeError("dims must each lie in [1, 64]")
    return dims


def parse_tol(text):
    """``"1e-8"`` sets tau_psd; ``"tau_psd=1e-8,tau_eig=1e-13"`` sets named fields."""
    if not text:
        return DEFAULT_TOL
    try:
        if "=" not in text:
            return DEFAULT_TOL.with_overrides(tau_psd=float(text))
        kw = {}
        for item in text.split(","):
            k, v = item.split("=")
            kw[k.strip()] = float(v)
        return DEFAULT_TOL.with_overrides(**kw)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance {text!r}: {exc}")


def _seed(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common(p, default_format):
    p.add_argument("--seed", type=_seed, default=_seed(_env("SEED", "0")))
    p.add_argument("--tol", type=parse_tol, default=parse_tol(_env("TOL", "")),
                   help="tau_psd value, or comma list like tau_psd=1e-8,tau_eig=1e-13")
    p.add_argument("--format", choices=("text", "json", "csv"), default=_env("FORMAT", default_format))
    p.add_argument("--out", metavar="FILE", help="write the JSON-lines records here")
    p.add_argument("--no-timestamp", action="store_true", help="omit timestamps (byte-stable output)")
    p.add_argument("--jobs", type=_positive, default=int(_env("JOBS", "1")))


def build_parser():
    ap = argparse.ArgumentParser(prog="opineq", description="Randomized verification of operator inequalities.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run one registered case")
    c.add_argument("case_id")
    _common(c, "json")
    c.add_argument("--dims", type=parse_dims, default=None)
    c.add_argument("--dim", type=int, default=None)
    c.add_argument("--trials", type=_positive, default=int(_env("TRIALS", "1")))
    for name in EXPONENT_FLAGS:
        c.add_argument(f"--{name}", type=float, default=None, help=f"fix exponent {name}")
    c.add_argument("--map", metavar="FILE", help="use this map spec (JSON) instead of a random map")

    s = sub.add_parser("suite", help="run every registered case over the dim/trial grid")
    _common(s, "text")
    s.add_argument("--dims", type=parse_dims, default=parse_dims(_env("DIMS", "2..6")))
    s.add_argument("--trials", type=_positive, default=int(_env("TRIALS", "200")))
    s.add_argument("--cases", default="all", help="comma-separated case ids")

    m = sub.add_parser("mean", help="weighted geometric mean of two matrix files")
    m.add_argument("file_a")
    m.add_argument("file_b")
    m.add_argument("--alpha", type=float, default=0.5)
    m.add_argument("--tol", type=parse_tol, default=parse_tol(_env("TOL", "")))

    x = sub.add_parser("counterexample", help="search for the unitary-free counterexample")
    x.add_argument("--eps", default=None, help="comma list of eps values")
    x.add_argument("--p-grid", default=None)
    x.add_argument("--q-grid", default=None)
    x.add_argument("--out", metavar="FILE", help="write the replayable bundle here")
    x.add_argument("--replay", metavar="FILE", help="recompute the gap of a saved bundle")
    x.add_argument("--tol", type=parse_tol, default=parse_tol(_env("TOL", "")))

    e = sub.add_parser("eig", help="Hermitian eigendecomposition of a matrix file")
    e.add_argument("file")
    e.add_argument("--tol", type=parse_tol, default=parse_tol(_env("TOL", "")))

    b = sub.add_parser("boundary", help="Furuta boundary search below the admissible q")
    b.add_argument("--samples", type=_positive, default=10_000)
    b.add_argument("--factor", type=float, default=0.9)
    b.add_argument("--dim", type=int, default=2)
    b.add_argument("--seed", type=_seed, default=_seed(_env("SEED", "0")))
    return ap


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _emit_records(records, fmt, stream_out):
    if fmt == "json":
        stream_out.write(harness.dumps_records(records))
    elif fmt == "csv":
        w = csv.writer(stream_out, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for rec in records:
            w.writerow(report_csv_row(rec))
    else:
        for rec in records:
            stream_out.write(_text_line(rec) + "\n")


def _text_line(rec):
    d = rec["digest"]
    status = "ok" if rec["holds"] else ("FAIL" if rec["asserted"] else "violation")
    gap = "nan" if rec["gap"] is None else f"{rec['gap']:.3e}"
    w = rec.get("witness")
    wtxt = "" if w is None else f" witness={w['kind']}:{w['invariant_residual']:.1e}"
    return f"{rec['case_id']:<16} dim={d.get('dim', '-')} trial={d.get('trial', '-')} {status:<9} gap={gap}{wtxt}"


def _summary_text(records):
    rows = harness.summarize(records)
    buf = io.StringIO()
    buf.write(f"{'case':<16} {'trials':>7} {'viol':>6} {'min gap':>12} {'witness ok':>11}  note\n")
    for s in rows:
        gap = "nan" if s["min_gap"] is None else f"{s['min_gap']:.3e}"
        wit = f"{s['witnesses_verified']}/{s['witnesses']}" if s["witnesses"] else "-"
        case = harness.CASES[s["case_id"]]
        note = "expected violation" if case.expect_violation else ("" if case.asserted else "exploratory")
        buf.write(f"{s['case_id']:<16} {s['trials']:>7} {s['violations']:>6} {gap:>12} {wit:>11}  {note}\n")
    for rec in records:
        if rec["asserted"] and not rec["holds"]:
            buf.write("FAILED " + json.dumps(rec["digest"], sort_keys=True) + "\n")
    for cid, seen in harness.negative_controls(records).items():
        buf.write(f"negative control {cid}: {'violation produced' if seen else 'NO violation produced'}\n")
    return buf.getvalue()


def _write_out(path, records):
    if path:
        with open(path, "w") as fh:
            fh.write(harness.dumps_records(records))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_check(args, out):
    if args.case_id not in harness.CASES:
        raise UsageError(f"unknown case id {args.case_id!r}; known: {', '.join(harness.CASES)}")
    if args.dim is not None:
        dims = parse_dims(str(args.dim))
    else:
        dims = args.dims or parse_dims(_env("DIMS", "3"))
    overrides = {k: getattr(args, k) for k in EXPONENT_FLAGS if getattr(args, k) is not None}
    if args.map:
        try:
            with open(args.map) as fh:
                phi = posmaps.map_from_json(json.load(fh))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read map spec: {exc}")
        if args.dim is None and args.dims is None:
            dims = (phi.in_dim,)
        if any(d != phi.in_dim for d in dims):
            raise UsageError(f"map acts on dimension {phi.in_dim}, not {dims}")
        overrides["map"] = phi
    config = harness.RunConfig(seed=args.seed, dims=dims, trials=args.trials, tol=args.tol,
                               cases=(args.case_id,), output=args.format, overrides=overrides,
                               jobs=args.jobs, timestamp=not args.no_timestamp)
    records = harness.run(config)
    _write_out(args.out, records)
    _emit_records(records, args.format, out)
    return harness.exit_code(records)


def cmd_suite(args, out):
    cases = tuple(c.strip() for c in args.cases.split(",") if c.strip())
    try:
        harness.expand_cases(cases)
    except KeyError as exc:
        raise UsageError(f"unknown case id(s): {exc.args[0]}")
    config = harness.RunConfig(seed=args.seed, dims=args.dims, trials=args.trials, tol=args.tol,
                               cases=cases, output=args.format, jobs=args.jobs,
                               timestamp=not args.no_timestamp)
    records = harness.run(config)
    _write_out(args.out, records)
    if args.format == "text":
        out.write(_summary_text(records))
    else:
        _emit_records(records, args.format, out)
    return harness.exit_code(records)


def cmd_mean(args, out):
    try:
        A = load_matrix(args.file_a)
        B = load_matrix(args.file_b)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse matrix file: {exc}")
    G = means.geometric_mean(A, B, args.alpha, args.tol)
    out.write(dumps_matrix(G) + "\n")
    return EXIT_OK


def _floats(text, default):
    if text is None:
        return default
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad grid {text!r}")


def bundle_from_search(best, tol):
    return {
        "kind": "unitary-counterexample",
        "eps": best["eps"],
        "p": best["p"],
        "q": best["q"],
        "gap": best["gap"],
        "refined_gap": best.get("refined_gap"),
        "dominance_gap": best["dominance_gap"],
        "A": matrix_to_json(best["A"]),
        "B": matrix_to_json(best["B"]),
        "tolerances": tol.as_dict(),
    }


def replay_bundle(bundle, tol=DEFAULT_TOL):
    """Recompute the gap of a saved bundle from its stored matrices."""
    from .posmaps import SchurMultiplier

    A = matrix_from_json(bundle["A"])
    phi = SchurMultiplier(matrix_from_json(bundle["B"]))
    p, q = bundle["p"], bundle["q"]
    Ap, Aq, Apq = linalg.powers(A, (p, q, p + q), tol)
    L = linalg.operator_abs(phi(Ap) @ phi(Aq), tol)
    return linalg.loewner_leq(L, phi(Apq), tol).gap


def cmd_counterexample(args, out):
    if args.replay:
        try:
            with open(args.replay) as fh:
                bundle = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read bundle: {exc}")
        gap = replay_bundle(bundle, args.tol)
        out.write(json.dumps({"gap": gap, "stored_gap": bundle["gap"], "difference": abs(gap - bundle["gap"])}) + "\n")
        return EXIT_OK if abs(gap - bundle["gap"]) <= 1e-12 else EXIT_FALSIFIED
    kw = {
        "eps_grid": _floats(args.eps, verify.COUNTEREXAMPLE_EPS_GRID),
        "p_grid": _floats(args.p_grid, verify.COUNTEREXAMPLE_P_GRID),
        "q_grid": _floats(args.q_grid, verify.COUNTEREXAMPLE_Q_GRID),
    }
    try:
        best, _ = verify.search_unitary_counterexample(tol=args.tol, **kw)
    except SearchExhausted as exc:
        best = exc.best or {}
        out.write(json.dumps({"found": False, "message": str(exc),
                              "best_gap": best.get("gap")}) + "\n")
        return EXIT_EXHAUSTED
    bundle = bundle_from_search(best, args.tol)
    text = json.dumps(bundle, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    out.write(text + "\n")
    return EXIT_OK


def cmd_eig(args, out):
    try:
        M = load_matrix(args.file)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot parse matrix file: {exc}")
    ed = linalg.eig_hermitian(M, args.tol)
    out.write(json.dumps({"values": ed.values.tolist(), "vectors": matrix_to_json(ed.vectors)}) + "\n")
    return EXIT_OK


def cmd_boundary(args, out):
    res = means.furuta_boundary_search(stream(args.seed, "F3.4-boundary-search"), samples=args.samples,
                                       dim=args.dim, factor=args.factor)
    best = res["best"]
    out.write(json.dumps({
        "samples": res["samples"], "violations": res["violations"], "factor": res["factor"],
        "best_gap": best["gap"], "best_p": best["p"], "best_r": best["r"], "best_q": best["q"],
        "best_A": matrix_to_json(best["A"]), "best_B": matrix_to_json(best["B"]),
    }, sort_keys=True) + "\n")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "suite": cmd_suite,
    "mean": cmd_mean,
    "counterexample": cmd_counterexample,
    "eig": cmd_eig,
    "boundary": cmd_boundary,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"opineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularError, NumericFailure) as exc:
        print(f"opineq: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OpineqError as exc:
        print(f"opineq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"opineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
