"""Acceptance criteria, one test each.

Every test records a one-line verdict; ``conftest.py`` prints the lines at
the end of the session, and running this file as a script prints them too.
"""

import time

import numpy as np
import pytest

from dualproj import (Infeasible, OptimizerConfig, StageConfig, Status, VertexListOracle, boxcut,
                      diagnose_infeasibility, eval_dual, generate_infeasible,
                      generate_marketplace, greedy_baseline, maximize_dual, project,
                      project_boxcut_eq, project_simplex_eq, stagewise_solve, wolfe_project)
from dualproj.dual import project_all
from dualproj.reference import reference_lp_solve, reference_qp_project, reference_qp_solve
from dualproj.smoothing import check_lemma1, quality_score
from dualproj.diagnostics import weak_duality_gap

from conftest import KINDS, random_problem, random_spec

RESULTS = {}


def report(n, ok, detail):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def test_01_projection_oracle():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = {}
    for kind in KINDS:
        w = 0.0
        for _ in range(1000):
            K = int(rng.integers(3, 9))
            spec = random_spec(rng, kind, K)
            xhat = rng.standard_normal(K) * rng.choice([0.3, 1.0, 3.0]) + 0.5
            w = max(w, np.linalg.norm(project(spec, xhat).x - reference_qp_project(spec, xhat)))
        worst[kind] = w
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-8 and dt < 60
    report(1, ok, f"max error {max(worst.values()):.2e} over 7 kinds x 1000, {dt:.1f} s")


def test_02_specialized_vs_wolfe():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(500):
        K = int(rng.integers(2, 9))
        xhat = rng.standard_normal(K) * 2
        y = wolfe_project(VertexListOracle(np.eye(K)), xhat).x
        worst = max(worst, np.linalg.norm(project_simplex_eq(xhat).x - y))
    for _ in range(500):
        K = int(rng.integers(3, 9))
        d = int(rng.integers(2, K))
        _, V = boxcut(d).enumerate_vertices(K)
        xhat = rng.standard_normal(K) + 0.5
        y = wolfe_project(VertexListOracle(V), xhat).x
        worst = max(worst, np.linalg.norm(project_boxcut_eq(xhat, d).x - y))
    report(2, worst <= 1e-8, f"max distance {worst:.2e} over 2 x 500 trials")


def _supports(p, lam, gamma):
    return [r.support for r in project_all(p, lam, gamma)]


def test_03_gradient_check():
    rng = np.random.default_rng(3)
    h = 1e-5
    worst, checked, retries = 0.0, 0, 0
    for k in range(50):
        p = random_problem(rng, I=int(rng.integers(2, 21)), K=5, m=int(rng.integers(1, 5)))
        gamma = (1.0, 0.1)[k % 2]
        lam = np.abs(rng.standard_normal(p.m)) + 0.05
        for _ in range(20):
            if all(_supports(p, lam + s * h * e, gamma) == _supports(p, lam, gamma)
                   for e in np.eye(p.m) for s in (-1, 1)):
                break
            retries += 1
            lam = lam + rng.uniform(0, 1e-3, p.m)
        else:
            continue
        ev = eval_dual(p, lam, gamma)
        for j, e in enumerate(np.eye(p.m)):
            fd = (eval_dual(p, lam + h * e, gamma).g - eval_dual(p, lam - h * e, gamma).g) / (2 * h)
            worst = max(worst, abs(fd - ev.grad[j]) / max(1.0, abs(ev.grad[j])))
        checked += 1
    report(3, worst <= 1e-4 and checked == 50,
           f"{checked}/50 problems checked ({retries} kink retries), max rel. error {worst:.2e}")


def test_04_approximation_bound():
    holds = gap_holds = 0
    worst = np.inf
    for seed in range(200):
        p = generate_marketplace(I=5, K=3, m=2, seed=1000 + seed)
        gamma = (1.0, 0.1, 0.01)[seed % 3]
        _, _, lam0 = reference_lp_solve(p)
        _, _, lam_g = reference_qp_solve(p, gamma)
        lam_t = np.maximum(lam_g + np.random.default_rng(seed).normal(0, 0.2, p.m), 0.0)
        chk = check_lemma1(p, gamma, lam0, lam_g, lam_t, slack=1e-9)
        holds += chk.holds
        gap_holds += chk.gap_holds
        worst = min(worst, chk.rhs - chk.lhs, chk.smoothing_bound - chk.smoothing_gap)
    report(4, holds == 200 and gap_holds == 200,
           f"bound held {holds}/200, smoothing gap held {gap_holds}/200, min slack {worst:.2e}")


def test_05_stagewise_quality():
    qs, slowest = [], 0.0
    for seed in range(20):
        p = generate_marketplace(I=100, K=10, m=5, seed=seed)
        t0 = time.perf_counter()
        res = stagewise_solve(p)
        slowest = max(slowest, time.perf_counter() - t0)
        ref = stagewise_solve(p, StageConfig(R=200))
        qs.append(quality_score(res.g0, res.g0_zero, max(ref.best_g0, res.best_g0)))
    ok = min(qs) > 0.999 and slowest < 30
    report(5, ok, f"min Q {min(qs):.8f} over 20 instances, slowest run {slowest:.2f} s")


def test_06_corral_dimension_empirics():
    rng = np.random.default_rng(6)
    mu_ok = vert_ok = trials = 0
    while trials < 200:
        p = generate_marketplace(I=20, K=4, m=3, seed=int(rng.integers(2**31)), scale=0.3)
        try:
            x, _, _ = reference_lp_solve(p)
        except Infeasible:
            continue
        trials += 1
        dims = [max(np.count_nonzero(xi > 1e-9) - 1, 0) for xi in p.split(x)]
        mu_ok += np.mean(dims) <= p.m / p.I
        vert_ok += sum(d == 0 for d in dims) >= p.I - p.m
    unique = 0
    for _ in range(200):
        p = generate_marketplace(I=20, K=4, m=3, seed=int(rng.integers(2**31)))
        lam = rng.exponential(1.0, p.m)
        ok = True
        for blk, s in zip(p.blocks, p.split(p.A.T @ lam + p.c)):
            vals = np.sort(blk.spec.enumerate_vertices(blk.K)[1] @ s)
            ok &= vals[1] - vals[0] > 1e-12
        unique += ok
    good = mu_ok >= 190 and vert_ok >= 190 and unique >= 198
    report(6, good, f"mu <= m/I in {mu_ok}/200, vertex blocks >= I-m in {vert_ok}/200, "
                    f"unique vertex minimizer at random lambda in {unique}/200")


def test_07_corral_trend():
    p = generate_marketplace(I=100, K=10, m=5, seed=7)
    mus, fracs = [], []
    for gamma in (1.0, 0.1, 0.01):
        rows = []
        maximize_dual(p, gamma, cfg=OptimizerConfig(max_iters=300),
                      callback=lambda lam, ev, step, pg: rows.append(ev.stats))
        mus.append(np.mean([s.mean_dim for s in rows]))
        fracs.append(np.mean([s.vertex_fraction for s in rows]))
    ok = mus[0] >= mus[1] >= mus[2] and fracs[0] <= fracs[1] <= fracs[2]
    report(7, ok, "mean mu " + " >= ".join(f"{m:.3f}" for m in mus)
           + "; vertex fraction " + " <= ".join(f"{f:.3f}" for f in fracs))


def test_08_infeasibility():
    proven = false_alarm = 0
    cfg = OptimizerConfig(max_iters=5000)
    for seed in range(20):
        p = generate_infeasible(I=30, K=5, m=3, seed=seed)
        with pytest.raises(Infeasible):
            reference_lp_solve(p)
        proven += diagnose_infeasibility(p, cfg=cfg, with_reference=False).status is Status.PROVEN
        q = generate_marketplace(I=30, K=5, m=3, seed=seed)
        reference_lp_solve(q)
        false_alarm += diagnose_infeasibility(q, cfg=cfg).status is Status.PROVEN
    report(8, proven == 20 and false_alarm == 0,
           f"proven {proven}/20 infeasible, false proofs {false_alarm}/20 feasible")


def test_09_optimizer_contract():
    monotone, close, worst = 0, 0, 0.0
    runs = 0
    for seed in range(10):
        p = generate_marketplace(I=20, K=4, m=3, seed=seed)
        gamma = 0.05
        _, _, lam_ref = reference_qp_solve(p, gamma)
        g_ref = eval_dual(p, lam_ref, gamma).g
        for method in ("pga", "lbfgsb"):
            lam, tr = maximize_dual(p, gamma, cfg=OptimizerConfig(method=method, max_iters=5000))
            g = tr.g
            runs += 1
            monotone += bool(np.all(np.diff(g) >= -1e-10))
            err = abs(tr.final.g - g_ref)
            worst = max(worst, err)
            close += err <= 1e-6
    report(9, monotone == runs and close == runs,
           f"monotone {monotone}/{runs}, within 1e-6 of reference {close}/{runs} "
           f"(max gap {worst:.1e})")


def test_10_weak_duality():
    rng = np.random.default_rng(10)
    worst = np.inf
    for t in range(1000):
        p = generate_marketplace(I=6, K=3, m=2, seed=t % 100, polytope="simplex_iq")
        x, _ = greedy_baseline(p)
        lam = rng.exponential(rng.choice([0.1, 1.0, 10.0]), p.m)
        worst = min(worst, weak_duality_gap(p, x, lam).gap)
    at_opt = 0.0
    for seed in range(20):
        p = generate_marketplace(I=10, K=4, m=2, seed=seed)
        x, _, lam = reference_lp_solve(p)
        at_opt = max(at_opt, abs(weak_duality_gap(p, x, lam, tol=1e-7).gap))
    report(10, worst >= -1e-9 and at_opt <= 1e-6,
           f"min gap {worst:.2e} over 1000 pairs, max gap at optimum {at_opt:.1e}")


def test_11_determinism():
    same = 0
    for seed in range(5):
        p = generate_marketplace(I=100, K=10, m=5, seed=seed)
        traces = []
        for threads in (1, 2, 8):
            res = stagewise_solve(p, StageConfig(threads=threads))
            traces.append([(r["g_gamma"], r["g0"], r["gamma"], r["grad_norm"]) for r in res.rows]
                          + [tuple(res.lam)])
        same += traces[0] == traces[1] == traces[2]
    report(11, same == 5, f"{same}/5 instances bit-identical across 1, 2, 8 threads")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS[k] for k in sorted(RESULTS)))
