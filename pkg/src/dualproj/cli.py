"""Command-line entry point (``dualproj``).

Exit codes: 0 success, 2 infeasibility proven, 3 parse/validation error,
4 iteration budget exhausted without convergence.
"""

import argparse
import csv
import json
import logging
import sys
from collections import defaultdict

import numpy as np

from . import __version__
from .diagnostics import (Status, check_infeasible, diagnose_infeasibility, gap_report,
                          infeasibility_bound)
from .dual import THREADS_ENV, eval_dual, resolve_threads
from .errors import DualprojError, ParseError, ValidationError
from .generators import generate_infeasible, generate_marketplace
from .io import parse_problem, read_trace, write_problem, write_summary, write_trace
from .optimizers import OptimizerConfig
from .polytope import Kind, PolytopeSpec
from .projections import project
from .smoothing import StageConfig, solve_fixed, stagewise_solve

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_LIMIT = 0, 2, 3, 4

log = logging.getLogger("dualproj")


def _vector(text):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def _fmt(x):
    return ",".join(f"{v:.15g}" for v in x)


def build_parser():
    ap = argparse.ArgumentParser(prog="dualproj", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="maximize the dual of a problem file")
    s.add_argument("problem")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float, help="fixed smoothing parameter")
    g.add_argument("--adaptive-gamma", action="store_true",
                   help="stage-wise gamma schedule (the default)")
    s.add_argument("--optimizer", choices=("pga", "agd", "lbfgsb"), default="lbfgsb")
    s.add_argument("--max-iters", type=int,
                   help="iteration cap with --gamma (default 1000); iterations between "
                        "convergence checks with the adaptive schedule (default 20)")
    s.add_argument("--threads", type=int, help=f"worker threads (fallback: ${THREADS_ENV})")
    s.add_argument("--trace", help="write the per-iteration trace CSV here")
    s.add_argument("--summary", help="write the JSON run summary here")

    pj = sub.add_parser("project", help="project one point onto a polytope")
    pj.add_argument("kind", choices=[k.value for k in Kind])
    pj.add_argument("--delta", type=int)
    pj.add_argument("--point", type=_vector, required=True)
    pj.add_argument("--vertices", help="general hull vertices, ';'-separated rows")

    gn = sub.add_parser("generate", help="write a synthetic problem from a JSON spec")
    gn.add_argument("spec")
    gn.add_argument("-o", "--output", required=True)

    ci = sub.add_parser("check-infeasible", help="look for a dual certificate of infeasibility")
    ci.add_argument("problem")
    ci.add_argument("--gamma", type=float, default=0.1)
    ci.add_argument("--optimizer", choices=("pga", "agd", "lbfgsb"), default="lbfgsb")
    ci.add_argument("--max-iters", type=int, default=5000)
    ci.add_argument("--threads", type=int)

    st = sub.add_parser("stats", help="plot data (CSV) from a trace file")
    st.add_argument("trace")
    st.add_argument("-o", "--output")
    return ap


def _solve(args):
    p = parse_problem(args.problem)
    threads = resolve_threads(args.threads)
    if args.gamma is not None:
        cfg = OptimizerConfig(method=args.optimizer, max_iters=args.max_iters or 1000)
        res = solve_fixed(p, args.gamma, cfg, threads=threads)
        lam, gamma, rows = res.lam, args.gamma, res.rows
        g0_val, g0_zero, best = res.g0, res.g0_zero, res.best_g0
        converged, warnings, stages = res.converged, list(res.trace.warnings), []
        message = res.trace.message
    else:
        cfg = StageConfig(R=args.max_iters or 20, threads=threads,
                          optimizer=OptimizerConfig(method=args.optimizer))
        res = stagewise_solve(p, cfg)
        lam, rows = res.lam, res.rows
        gamma = res.stages[-1].gamma if res.stages else rows[-1]["gamma"]
        g0_val, g0_zero, best = res.g0, res.g0_zero, res.best_g0
        stalled = any(s.repeats >= cfg.max_repeats and s.stalled for s in res.stages)
        converged, warnings = not stalled, list(res.warnings)
        stages = [vars(s) for s in res.stages]
        message = "stage-wise schedule finished"

    bounds = {}
    g_by_gamma = defaultdict(list)
    for r in rows:
        g_by_gamma[r["gamma"]].append(r["g_gamma"])
    verdict = None
    for gm, gs in g_by_gamma.items():
        bounds[gm] = infeasibility_bound(p, gm)
        v = check_infeasible(gs, bounds[gm])
        if verdict is None or v.status is Status.PROVEN:
            verdict = v
        if v.status is Status.PROVEN:
            break

    ev = eval_dual(p, lam, gamma, threads=threads)
    q = 1.0 if abs(best - g0_zero) < 1e-14 else (g0_val - g0_zero) / (best - g0_zero)
    try:
        gap = gap_report(p, lam, threads=threads).to_dict()
    except DualprojError as exc:
        gap = {"error": f"{type(exc).__name__}: {exc}"}
    summary = {
        "lambda": lam, "gamma": gamma, "g_gamma": ev.g, "g0": g0_val, "g0_zero": g0_zero,
        "g0_best": best, "Q": q, "converged": converged, "message": message,
        "optimizer": args.optimizer, "threads": threads, "iterations": len(rows),
        "corral": {"mean_dim": ev.stats.mean_dim, "vertex_fraction": ev.stats.vertex_fraction,
                   "histogram": ev.stats.histogram},
        "infeasibility": verdict.to_dict() if verdict else None,
        "gap": gap, "stages": stages, "warnings": warnings,
    }
    if args.trace:
        write_trace(rows, args.trace)
    if args.summary:
        write_summary(summary, args.summary)
    print(f"g0={g0_val:.12g} g_gamma={ev.g:.12g} Q={q:.6f} iterations={len(rows)} "
          f"mu={ev.stats.mean_dim:.4g} vertex_frac={ev.stats.vertex_fraction:.4g}")
    if verdict is not None and verdict.status is Status.PROVEN:
        print("infeasible: dual value exceeds the feasibility bound", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK if converged else EXIT_LIMIT


def _project(args):
    verts = None
    if args.vertices:
        verts = np.array([[float(v) for v in row.split(",")] for row in args.vertices.split(";")])
    spec = PolytopeSpec(Kind(args.kind), args.delta, verts)
    bad = spec.violations(args.point.size)
    if bad:
        raise ValidationError([(None, r) for r in bad])
    print(_fmt(project(spec, args.point).x))
    return EXIT_OK


def _generate(args):
    with open(args.spec, encoding="utf-8") as fh:
        spec = json.load(fh)
    if spec.get("kind") == "infeasible":
        spec.pop("kind")
        p = generate_infeasible(spec)
    else:
        p = generate_marketplace(spec)
    write_problem(p, args.output)
    return EXIT_OK


def _check_infeasible(args):
    p = parse_problem(args.problem)
    cfg = OptimizerConfig(method=args.optimizer, max_iters=args.max_iters)
    v = diagnose_infeasibility(p, args.gamma, cfg, resolve_threads(args.threads))
    print(json.dumps(v.to_dict(), sort_keys=True))
    return EXIT_INFEASIBLE if v.status is Status.PROVEN else EXIT_OK


def stats_rows(trace):
    """Plot series from trace rows: Q per iteration, mean mu and vertex fraction per gamma."""
    out = [("Q_vs_iter", r["iter"], r["Q"]) for r in trace]
    by_gamma = defaultdict(list)
    for r in trace:
        by_gamma[r["gamma"]].append(r)
    for gm in sorted(by_gamma, reverse=True):
        rs = by_gamma[gm]
        out.append(("mu_vs_gamma", gm, float(np.mean([r["mu"] for r in rs]))))
        out.append(("vertex_frac_vs_gamma", gm, float(np.mean([r["vertex_frac"] for r in rs]))))
    return out


def _stats(args):
    rows = stats_rows(read_trace(args.trace))
    fh = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("series", "x", "y"))
        for name, x, y in rows:
            w.writerow((name, repr(x) if isinstance(x, float) else x, repr(float(y))))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


COMMANDS = {"solve": _solve, "project": _project, "generate": _generate,
            "check-infeasible": _check_infeasible, "stats": _stats}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
