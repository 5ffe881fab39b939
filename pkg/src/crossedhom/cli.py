"""Command-line front end: ``crossedhom <subcommand> ...``.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import deformation as dfm
from .algebra_core import (
    AlgebraAction,
    adjoint_action,
    borel_sl2,
    algebra_from_json,
    algebra_to_json,
    check_action,
    check_jacobi,
    matrix_from_json,
    zero_action,
)
from .ce_cohomology import cohomology_table_rep, verify_complex_rep
from .crossed_alg import AlgCrossedHom, check_representation, crossed_residual, residual_is_zero, twisted_matrices
from .errors import FlowError, InputError, PathError
from .exprlang import ExprSyntaxError
from .matrix_group import (
    UT2Element,
    check_crossed_hom_group,
    default_elements,
    default_pairs,
    exp_curve,
    expected_tangent,
    family_from_params,
    family_map,
    group_coboundary,
    scaled_residual,
    tangent_map,
    theta_D,
    twisted_rep_float,
    van_est1,
    van_est2,
    ce_coboundary1_float,
)
from .ratlinalg import RatMatrix, rationalize
from .report import RunReport
from .section4 import Section4Config, run_section4

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULT_TOL = {
    "verify-family": 1e-9,
    "tangent": 1e-6,
    "vanest-check": 1e-5,
    "rigidity": 1e-6,
    "moser": 1e-6,
    "identify": 1e-6,
}
N_VANEST_W = 20


# ------------------------------------------------------------------ inputs


def load_json(path: str):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else f"{x:.6g}"


def _action_from_candidate(data: dict, g, h) -> AlgebraAction:
    action = data.get("action", "ad") if isinstance(data, dict) else "ad"
    if action == "ad":
        if g != h:
            raise InputError("action 'ad' needs source and target to be the same algebra")
        return adjoint_action(g)
    if action == "zero":
        return zero_action(g, h)
    if not isinstance(action, list):
        raise InputError("candidate 'action' must be 'ad', 'zero' or a list of matrices")
    return AlgebraAction(g, h, tuple(matrix_from_json({"matrix": m}, h.dim, h.dim) for m in action))


def _load_candidate(args):
    g = algebra_from_json(load_json(args.algebra))
    h = algebra_from_json(load_json(args.target)) if args.target else g
    cand = load_json(args.candidate)
    d = matrix_from_json(cand, h.dim, g.dim)
    theta = _action_from_candidate(cand, g, h)
    inputs = {
        "algebra": algebra_to_json(g),
        "target": algebra_to_json(h),
        "matrix": [[str(x) for x in row] for row in d.entries],
        "action": [[[str(x) for x in row] for row in m.entries] for m in theta.matrices],
    }
    return g, h, d, theta, inputs


def _family(args):
    params = {}
    for name in ("q", "mu", "lam", "p"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    try:
        return family_from_params(args.family, **params)
    except KeyError as exc:
        raise InputError(f"family {args.family} needs --{'lambda' if exc.args[0] == 'lam' else exc.args[0]}") from exc


def _tol(args) -> float:
    return args.tol if args.tol is not None else DEFAULT_TOL[args.command]


def _new_report(args, inputs: dict) -> RunReport:
    inputs = dict(inputs)
    inputs["grid"] = args.grid
    if args.tol is not None:
        inputs["tol"] = args.tol
    return RunReport(command=["crossedhom"] + list(args.argv), inputs=inputs, seed=args.seed)


# ------------------------------------------------------------- algebra side


def _residual_checks(report: RunReport, g, h, d: RatMatrix, theta: AlgebraAction) -> bool:
    jac = [("jacobi source", check_jacobi(g))]
    if h != g:
        jac.append(("jacobi target", check_jacobi(h)))
    for name, res in jac:
        report.add(name, res.ok, detail="" if res.ok else f"witness {res.witness} residual {[str(x) for x in res.residual]}")
    act = check_action(theta)
    report.add("action is a homomorphism into Der(h)", act.ok, detail="" if act.ok else f"witness {act.witness}")
    table = crossed_residual(d, g, h, theta)
    ok = residual_is_zero(table)
    worst = max((abs(float(x)) for v in table.values() for x in v), default=0.0)
    detail = "exact"
    if not ok:
        (i, j), v = next((k, v) for k, v in table.items() if any(v))
        detail = f"nonzero at (e{i + 1}, e{j + 1}): [{', '.join(str(x) for x in v)}]"
    report.add("crossed homomorphism identity", ok, worst, None, detail)
    return ok and act.ok


def cmd_verify(args) -> RunReport:
    g, h, d, theta, inputs = _load_candidate(args)
    report = _new_report(args, inputs)
    _residual_checks(report, g, h, d, theta)
    return report


def cmd_cohomology(args) -> RunReport:
    g, h, d, theta, inputs = _load_candidate(args)
    report = _new_report(args, inputs)
    _residual_checks(report, g, h, d, theta)
    mats = twisted_matrices(AlgCrossedHom(g, h, theta, d, checked=False))
    bad = check_representation(g, mats)
    report.add(
        "twisted action is a representation",
        bad is None,
        detail="" if bad is None else f"fails on (e{bad[0] + 1}, e{bad[1] + 1})",
    )
    ok, k = verify_complex_rep(g, mats)
    report.add("d^{k+1} d^k = 0", ok, detail="exact" if ok else f"first failure at k={k}")
    if ok:
        rows = cohomology_table_rep(g, mats, args.max_degree)
        report.tables["cohomology"] = {
            "columns": ["k", "dim C^k", "rank d^k", "dim H^k"],
            "rows": [[r.k, r.dim_cochains, r.rank, r.dim_cohomology] for r in rows],
        }
    return report


# --------------------------------------------------------------- group side


def cmd_verify_family(args) -> RunReport:
    F = _family(args)
    report = _new_report(args, {"family": F.tag, "params": F.__dict__})
    tol = _tol(args)
    pairs = default_pairs(dense=args.grid == "dense")
    r = check_crossed_hom_group(family_map(F), pairs)
    report.check_below("crossed identity D(gh) = D(g) g D(h) g^-1", r, tol, f"{len(pairs)} pairs")
    m = max(scaled_residual(theta_D(F, g1 * g2), theta_D(F, g1) @ theta_D(F, g2)) for g1, g2 in pairs)
    report.check_below("Theta_D multiplicative (scaled)", m, tol)
    return report


def cmd_tangent(args) -> RunReport:
    F = _family(args)
    report = _new_report(args, {"family": F.tag, "params": F.__dict__, "proof_curve": args.proof_curve})
    tol = _tol(args)
    t = tangent_map(F, proof_curve=args.proof_curve)
    expected = expected_tangent(F)
    report.check_below("tangent map vs family template", float(np.abs(t - expected).max()), tol)
    report.tables["tangent"] = {
        "columns": ["row", "d(e1)", "d(e2)"],
        "rows": [[i + 1, _fmt(t[i, 0]), _fmt(t[i, 1])] for i in range(2)],
    }
    entries = [[rationalize(float(x)) for x in row] for row in t]
    if any(x is None for row in entries for x in row):
        report.add("tangent map is crossed (exact)", False, detail="entries not rational")
    else:
        g = borel_sl2()
        ok = residual_is_zero(crossed_residual(RatMatrix.from_rows(entries), g, g, adjoint_action(g)))
        report.add("tangent map is crossed (exact)", ok, detail=f"rationalized {[[str(x) for x in r] for r in entries]}")
    return report


def _sample_cochain(g: UT2Element) -> np.ndarray:
    """A smooth normalized 1-cochain on G used for the degree 1 -> 2 check."""
    return np.array([np.log(g.a) + 0.5 * g.b * g.b, g.b * g.a + np.sin(np.log(g.a))])


def cmd_vanest_check(args) -> RunReport:
    F = _family(args)
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    report = _new_report(args, {"family": F.tag, "params": F.__dict__, "n_w": N_VANEST_W})
    report.seed = seed
    tol = _tol(args)
    d = expected_tangent(F)
    rep = lambda g: theta_D(F, g)  # noqa: E731
    basis = (np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    worst = 0.0
    for _ in range(N_VANEST_W):
        w = rng.uniform(-2, 2, 2)
        c = group_coboundary(rep, w, 0)
        for x in basis:
            worst = max(worst, float(np.abs(van_est1(c, x) - twisted_rep_float(d, x) @ w).max()))
    report.check_below("degree 0->1: VE(d w)(x) = theta_d(x) w", worst, tol, f"{N_VANEST_W} random w x basis")

    dc = group_coboundary(rep, _sample_cochain, 1)
    alpha1 = lambda x: van_est1(_sample_cochain, x)  # noqa: E731
    worst2 = 0.0
    for x1, x2 in ((basis[0], basis[1]), (basis[1], basis[0])):
        lhs = van_est2(dc, x1, x2)
        rhs = ce_coboundary1_float(d, alpha1, x1, x2)
        worst2 = max(worst2, float(np.abs(lhs - rhs).max()))
    report.check_below("degree 1->2: VE(d c) = d_CE VE(c)", worst2, tol, "sample cochain")
    return report


# ------------------------------------------------------------- deformations


def _load_path(args) -> dfm.DeformationPath:
    P = dfm.path_from_json(load_json(args.path))
    dfm.validate_path(P)
    return P


def _verdict_json(label: str, v: dfm.RigidityVerdict) -> dict:
    out = {"path": label, "verdict": v.kind, "summary": v.summary()}
    if isinstance(v, dfm.Trivial):
        out.update(gauge=v.gauge, interval=list(v.interval), gauge_residual=v.residual)
    elif isinstance(v, dfm.Nontrivial):
        out.update(obstruction=v.obstruction, certificate=v.certificate)
    elif isinstance(v, dfm.Indeterminate):
        out.update(reason=v.reason)
    return out


def cmd_rigidity(args) -> RunReport:
    P = _load_path(args)
    report = _new_report(args, {"path": P.to_json()})
    tol = _tol(args)
    label = f"{P.family} " + ", ".join(f"{k}={P.text(k)}" for k in dfm.PARAM_NAMES[P.family])
    pairs = default_pairs(dense=args.grid == "dense")
    s_values = [float(s) for s in np.linspace(-P.eps / 2, P.eps / 2, 5)]
    cocycle = max(dfm.cocycle_residual(P, s, pairs) for s in s_values)
    report.check_below("dhat_s is a 1-cocycle", cocycle, tol, f"s in {[round(s, 3) for s in s_values]}")
    dh = max(
        float(np.abs(dfm.dhat_numeric(P, g, s) - dfm.dhat_closed(P, g, s)).max())
        for s in s_values
        for g in default_elements()
    )
    report.check_below("dhat numeric vs closed form", dh, 1e-5 if args.tol is None else args.tol)
    v = dfm.rigidity_verdict(P)
    if isinstance(v, dfm.Trivial):
        report.check_below("gauge reproduces D_s", v.residual, tol, f"on [{v.interval[0]:g}, {v.interval[1]:g}]")
    report.verdicts.append(_verdict_json(label, v))
    return report


def cmd_moser(args) -> RunReport:
    P = _load_path(args)
    report = _new_report(args, {"path": P.to_json(), "smax": args.smax, "steps": args.steps})
    tol = _tol(args)
    try:
        trace = dfm.moser_flow(P, args.smax, args.steps)
    except FlowError as exc:
        report.add("moser flow integrates", False, detail=str(exc))
        return report
    report.add("moser flow integrates", True, detail=f"{args.steps} RK4 steps on [0, {args.smax:g}]")
    r = dfm.moser_gauge_residual(P, trace)
    report.check_below("max gauge residual", r, tol)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "tau_a", "tau_b"])
    for s, a, b in trace.rows():
        writer.writerow([f"{s:.10g}", f"{a:.15g}", f"{b:.15g}"])
    if args.csv:
        Path(args.csv).write_text(buf.getvalue())
    else:
        args.emit_before = buf.getvalue()
    return report


def _identify_target(args):
    if args.map == "inverse":
        return (lambda g: g.inverse()), {"map": "inverse"}
    if args.map == "identity":
        return (lambda g: g), {"map": "identity"}
    if args.family is None:
        raise InputError("identify needs --family (with parameters) or --map")
    F = _family(args)
    return family_map(F), {"family": F.tag, "params": F.__dict__}


def cmd_identify(args) -> RunReport:
    D, inputs = _identify_target(args)
    report = _new_report(args, inputs)
    F = dfm.identify_family(D, _tol(args))
    if F is None:
        report.add("identified as a crossed homomorphism", False, detail="no family matches on the default grid")
        return report
    params = ", ".join(f"{k}={v:.6g}" for k, v in F.__dict__.items())
    report.add("identified as a crossed homomorphism", True, detail=f"{F.tag}({params})")
    report.verdicts.append({"path": "black box", "verdict": F.tag, "summary": f"{F.tag}({params})", "params": F.__dict__})
    return report


def cmd_section4(args) -> RunReport:
    cfg = Section4Config(grid=args.grid, seed=args.seed, tol=args.tol)
    report = _new_report(args, {"suite": "section4"})
    checks, rows = run_section4(cfg)
    report.checks.extend(checks)
    report.tables["verdict_table"] = {
        "columns": ["path", "expected", "verdict"],
        "rows": [[r["path"], r["expected"], r["verdict"]] for r in rows],
    }
    return report


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", choices=("default", "dense"), default="default")
    common.add_argument("--tol", type=float, default=None, help="override the documented tolerance")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--seed", type=int, default=None)

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--family", choices=("g1", "g2", "g3"), type=str.lower)
    fam.add_argument("--q", type=float)
    fam.add_argument("--mu", type=float)
    fam.add_argument("--lambda", dest="lam", type=float)
    fam.add_argument("--p", type=float)

    parser = argparse.ArgumentParser(prog="crossedhom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func in (("verify", cmd_verify), ("cohomology", cmd_cohomology)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("algebra")
        sp.add_argument("candidate")
        sp.add_argument("--target", help="target algebra JSON (default: same as source)")
        if name == "cohomology":
            sp.add_argument("--max-degree", type=int, default=None)
        sp.set_defaults(func=func)

    for name, func in (("verify-family", cmd_verify_family), ("tangent", cmd_tangent), ("vanest-check", cmd_vanest_check)):
        sp = sub.add_parser(name, parents=[common, fam])
        if name == "tangent":
            sp.add_argument("--proof-curve", action="store_true", help="use the curves (e^{tx}, ty)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("rigidity", parents=[common])
    sp.add_argument("--path", required=True)
    sp.set_defaults(func=cmd_rigidity)

    sp = sub.add_parser("moser", parents=[common])
    sp.add_argument("--path", required=True)
    sp.add_argument("--smax", type=float, default=0.2)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument("--csv", help="write the tau trace here (default: stdout)")
    sp.set_defaults(func=cmd_moser)

    sp = sub.add_parser("identify", parents=[common, fam])
    sp.add_argument("--map", choices=("family", "inverse", "identity"), default="family")
    sp.set_defaults(func=cmd_identify)

    sp = sub.add_parser("section4", parents=[common])
    sp.set_defaults(func=cmd_section4)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    args.argv = argv
    args.emit_before = ""
    if args.command in ("verify-family", "tangent", "vanest-check") and args.family is None:
        print("error: --family is required", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = args.func(args).finish()
    except (InputError, PathError, ExprSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    payload = json.dumps(report.to_json(), indent=2, default=str)
    if args.json == "-":
        print(payload)
    else:
        text = report.to_text()
        if args.emit_before:
            # csv on stdout: keep the report as comment lines after it
            sys.stdout.write(args.emit_before)
            text = "\n".join("# " + line for line in text.splitlines())
        print(text)
        if args.json:
            Path(args.json).write_text(payload + "\n")
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
