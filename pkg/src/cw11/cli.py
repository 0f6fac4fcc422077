"""Command-line front end: ``cw11 {validate,extend,body-check,cex}``.

Every command emits a JSON run report.  Exit codes: 0 success or feasible,
1 infeasible data, 2 malformed input, 3 internal certificate failure.
"""
from __future__ import annotations

import argparse
import itertools
import sys
import warnings
from pathlib import Path

import numpy as np

from . import counterexample as cex
from .balls import LAMBDA_SLACK, CertificateError
from .body import check_body
from .extension import BRACKET_TOL, ExtensionError, extend_many
from .jet import REL_TOL, InfeasibleJetError, JetError, cw11_gap, minimal_cw11_constant
from .jetio import (FileFormatError, RunReport, digest, format_jet, parse_body, parse_jet,
                    parse_queries, points_csv, read_text, sweep_csv)

EXIT_OK, EXIT_INFEASIBLE, EXIT_MALFORMED, EXIT_CERTIFICATE = 0, 1, 2, 3
OUTPUT_GAP_TOL = 1e-8


def _cw_outputs(rep) -> dict:
    out = {
        "feasible": rep.feasible,
        "minimal_M": rep.minimal_M,
        "worst_pair": list(rep.worst_pair) if rep.worst_pair else None,
        "min_gap_at_M": rep.min_gap_at_M,
        "lip_G": rep.lip_G,
        "gamma": rep.gamma,
    }
    if rep.feasible and rep.minimal_M == 0:
        out["note"] = "constant gradient: any M > 0 works"
    return out


def cmd_validate(args, argv) -> tuple[RunReport, str | None]:
    text = read_text(args.jet)
    jet = parse_jet(text)
    rep = minimal_cw11_constant(jet)
    tol = args.tol if args.tol is not None else REL_TOL * jet.scale()
    out = _cw_outputs(rep)
    feasible = rep.feasible
    if args.M is not None and len(jet) > 1:
        gap = cw11_gap(jet, args.M)
        out["M"] = args.M
        out["gap_at_given_M"] = gap
        feasible = feasible and gap >= -tol
    code = EXIT_OK if feasible else EXIT_INFEASIBLE
    return RunReport(argv, "feasible" if feasible else "infeasible", code,
                     {"jet": digest(text)}, out, {"gap_tol": tol, "rel_tol": REL_TOL}), None


def _grid(bounds, dim: int) -> np.ndarray:
    lo, hi, n = float(bounds[0]), float(bounds[1]), int(bounds[2])
    if dim > 2:
        raise FileFormatError("--grid supports dimension 1 or 2 only")
    if n < 1:
        raise FileFormatError("--grid needs N >= 1")
    axis = np.linspace(lo, hi, n)
    return np.array(list(itertools.product(axis, repeat=dim)), dtype=float)


def cmd_extend(args, argv) -> tuple[RunReport, str | None]:
    text = read_text(args.jet)
    jet = parse_jet(text)
    inputs = {"jet": digest(text)}
    if args.grid is not None:
        Q = _grid(args.grid, jet.dim)
        order = "canonical"
    elif args.queries is not None:
        qtext = read_text(args.queries)
        inputs["queries"] = digest(qtext)
        Q = parse_queries(qtext)
        if Q.shape[1] != jet.dim:
            raise FileFormatError(f"queries have dimension {Q.shape[1]}, jet has {jet.dim}")
        order = args.order
    else:
        raise FileFormatError("extend needs --queries or --grid")

    rep = minimal_cw11_constant(jet)
    tols = {"rel_tol": REL_TOL, "bracket_tol": BRACKET_TOL, "lambda_slack": LAMBDA_SLACK,
            "output_gap_tol": OUTPUT_GAP_TOL}
    out = {"validation": _cw_outputs(rep)}
    if not rep.feasible:
        return RunReport(argv, "infeasible", EXIT_INFEASIBLE, inputs, out, tols), None
    M = args.M if args.M is not None else rep.resolved_M()
    out["M"] = M
    if len(jet) > 1 and cw11_gap(jet, M) < -REL_TOL * jet.scale():
        out["gap_at_M"] = cw11_gap(jet, M)
        return RunReport(argv, "infeasible", EXIT_INFEASIBLE, inputs, out, tols), None

    trace = extend_many(jet, M, Q, theta=args.theta, order=order, check=False)
    final = trace.jet
    gap = cw11_gap(final, M) if len(final) > 1 else 0.0
    out["final_gap"] = gap
    out["entries"] = len(final)
    out["order"] = trace.order
    out["steps"] = [
        {"query": k, "x": s.x, "g": s.gx, "s": s.s, "i": s.i, "f": s.fx,
         "lambda0": s.lambda0, "theta": s.theta, "reused": s.reused}
        for k, s in zip(trace.order, trace.steps)
    ]
    if gap < -OUTPUT_GAP_TOL * final.scale():
        return RunReport(argv, "output failed re-validation", EXIT_CERTIFICATE, inputs, out, tols), None

    if args.format == "csv":
        X = np.array([s.x for s in trace.steps]).reshape(-1, jet.dim)
        G = np.array([s.gx for s in trace.steps]).reshape(-1, jet.dim)
        payload = points_csv(X, [s.fx for s in trace.steps], G)
    else:
        payload = format_jet(final)
    return RunReport(argv, "extended", EXIT_OK, inputs, out, tols), payload


def cmd_body_check(args, argv) -> tuple[RunReport, str | None]:
    text = read_text(args.body)
    rep = check_body(parse_body(text))
    out = {
        "delta_O": rep.delta_O,
        "delta_KW": rep.delta_KW,
        "feasible": rep.feasible,
        "worst_outer": rep.worst_outer,
        "worst_kw": list(rep.worst_kw) if rep.worst_kw else None,
        "worst_parallel": list(rep.worst_parallel) if rep.worst_parallel else None,
        "parallel_slack": rep.parallel_slack,
        "note": "feasible data is interpolable by the boundary of a C^{1,1} convex body",
    }
    code = EXIT_OK if rep.feasible else EXIT_INFEASIBLE
    return RunReport(argv, "feasible" if rep.feasible else "infeasible", code,
                     {"body": digest(text)}, out, {"rel_tol": REL_TOL}), None


def _cex_report_dict(r: cex.CexReport) -> dict:
    return {"k": r.k, "r": r.r, "K": r.K, "f_value": r.f_value, "F_value": r.F_value,
            "tangent_direct": r.tangent_direct, "tangent_closed_form": r.tangent_closed_form,
            "tangent_infinite": r.tangent_infinite, "lower_bound": r.lower_bound}


def cmd_cex(args, argv) -> tuple[RunReport, str | None]:
    tols = {"trunc_tol": cex.TRUNC_TOL}
    payload = None
    if args.what == "tangent":
        rep = cex.tangent_value(cex.CexConfig.for_tangent(args.k, args.r, args.K))
        out = _cex_report_dict(rep)
        ok = rep.tangent_direct >= rep.lower_bound
    elif args.what == "scan":
        m = cex.ball_bound_scan(args.dim, args.K, args.samples, args.seed)
        out = {"dim": args.dim, "K": args.K or args.dim, "samples": args.samples,
               "seed": args.seed, "max_f": m, "bound": cex.BALL_BOUND}
        ok = m <= cex.BALL_BOUND + 1e-12
    else:
        reps = cex.mc_divergence_sweep(args.r, args.k, args.K)
        rows = [(r.k, r.tangent_direct, r.lower_bound) for r in reps]
        out = {"r": args.r, "rows": [list(r) for r in rows]}
        ok = all(t >= b for _, t, b in rows)
        if args.format == "csv":
            payload = sweep_csv(rows)
    code = EXIT_OK if ok else EXIT_CERTIFICATE
    return RunReport(argv, "ok" if ok else "bound violated", code, {}, out, tols), payload


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cw11", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check the convex C^{1,1} condition on a jet file")
    v.add_argument("--jet", required=True)
    v.add_argument("--M", type=float)
    v.add_argument("--tol", type=float)
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("extend", help="extend a jet to query points")
    e.add_argument("--jet", required=True)
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--queries")
    src.add_argument("--grid", nargs=3, metavar=("LO", "HI", "N"))
    e.add_argument("--M", type=float)
    e.add_argument("--theta", type=float, default=0.5)
    e.add_argument("--order", choices=("given", "canonical"), default="given")
    e.add_argument("--out")
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.set_defaults(func=cmd_extend)

    b = sub.add_parser("body-check", help="check the convex-body normal conditions")
    b.add_argument("--body", required=True)
    b.set_defaults(func=cmd_body_check)

    c = sub.add_parser("cex", help="counterexample computations")
    csub = c.add_subparsers(dest="what", required=True)
    t = csub.add_parser("tangent")
    t.add_argument("--k", type=int, required=True)
    t.add_argument("--r", type=float, default=3.0)
    t.add_argument("--K", type=int)
    s = csub.add_parser("scan")
    s.add_argument("--dim", type=int, default=50)
    s.add_argument("--K", type=int)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    w = csub.add_parser("sweep")
    w.add_argument("--r", type=float, default=3.0)
    w.add_argument("--k", type=int, nargs="+", default=[10, 20, 40])
    w.add_argument("--K", type=int)
    w.add_argument("--format", choices=("json", "csv"), default="json")
    w.add_argument("--out")
    c.set_defaults(func=cmd_cex)
    return p


def run(argv: list[str]) -> tuple[RunReport, str | None]:
    """Parse ``argv`` and execute.

    Returns the report and the data payload (augmented jet or CSV), if any.
    Errors are folded into the report with the matching exit code.
    """
    args = build_parser().parse_args(argv)
    payload = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            rep, payload = args.func(args, argv)
        except (FileFormatError, JetError) as exc:
            rep = RunReport(argv, "malformed input", EXIT_MALFORMED, outputs={"error": str(exc)})
        except ExtensionError as exc:
            infeasible = isinstance(exc.cause, InfeasibleJetError)
            code = EXIT_INFEASIBLE if infeasible else EXIT_CERTIFICATE
            rep = RunReport(argv, "infeasible" if infeasible else "certificate failure", code,
                            outputs={"error": str(exc), "query": exc.index})
        except InfeasibleJetError as exc:
            rep = RunReport(argv, "infeasible", EXIT_INFEASIBLE, outputs={"error": str(exc)})
        except CertificateError as exc:
            rep = RunReport(argv, "certificate failure", EXIT_CERTIFICATE, outputs={"error": str(exc)})
        except (ValueError, cex.DomainError) as exc:
            rep = RunReport(argv, "malformed input", EXIT_MALFORMED, outputs={"error": str(exc)})
    rep.warnings.extend(str(w.message) for w in caught)
    out_path = getattr(args, "out", None)
    if payload is not None and out_path is not None:
        rep.outputs["written"] = str(out_path)
    return rep, payload


def main(argv: list[str] | None = None) -> int:
    """Entry point.  Data payloads go to ``--out`` when given, else to stdout
    with the report moved to stderr; otherwise the report goes to stdout."""
    argv = list(sys.argv[1:] if argv is None else argv)
    rep, payload = run(argv)
    out_path = rep.outputs.get("written")
    if payload is not None and out_path is not None:
        Path(out_path).write_text(payload, encoding="utf-8")
        sys.stdout.write(rep.to_json())
    elif payload is not None:
        sys.stdout.write(payload)
        sys.stderr.write(rep.to_json())
    else:
        sys.stdout.write(rep.to_json())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
