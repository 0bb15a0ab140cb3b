"""Stage-wise choice of the smoothing parameter gamma.

Each stage fixes a tolerance ``eps`` (1e-1, 1e-2, 1e-3), picks ``gamma`` so
that the smoothing error bound ``gamma * psi`` is at most ``eps/2`` of the
estimated opportunity ``g_drop``, and runs the optimizer in blocks of ``R``
iterations until one block improves ``g_0`` by no more than
``eps/2 * g_drop``.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dual import eval_dual, eval_g0, project_all
from .errors import DegenerateAnchor, InvalidGamma
from .optimizers import OptimizerConfig, maximize_dual, projected_grad_norm
from .problem import Problem

log = logging.getLogger(__name__)


def psi_tilde(m, delta):
    return 0.5 * m * delta


def problem_delta(p: Problem):
    """Largest squared vertex norm over the blocks (``1`` for all-simplex problems)."""
    return max(blk.spec.delta_equiv(blk.K) for blk in p.blocks)


def max_half_sq_norm(p: Problem):
    return sum(blk.spec.max_half_sq_norm(blk.K) for blk in p.blocks)


def psi_gamma(p: Problem, x0):
    """``max_{x in C} x.x/2 - x0.x0/2``."""
    x0 = np.asarray(x0, dtype=float)
    return max_half_sq_norm(p) - 0.5 * float(x0 @ x0)


def sufficient_convergence(g0_bar, g0_tilde, gamma, psi_a, eps, g_drop):
    half = 0.5 * eps * g_drop
    return (g0_bar - g0_tilde) <= half and gamma * psi_a <= half


@dataclass
class Lemma1Check:
    lhs: float
    rhs: float
    holds: bool
    psi: float
    smoothing_gap: float  # g0(lam0) - g0(lam_gamma)
    smoothing_bound: float  # gamma * psi
    gap_holds: bool


def check_lemma1(p: Problem, gamma, lam0, lam_gamma, lam_tilde, slack=1e-9):
    """Evaluate both sides of the approximation-error bound.

    ``lhs = g0(lam0) - g0(lam_tilde)`` and
    ``rhs = g0(lam_gamma) - g0(lam_tilde) + gamma * psi`` where ``psi`` is
    measured at the projection for ``lam0``.
    """
    a = eval_g0(p, lam0)[0]
    b = eval_g0(p, lam_gamma)[0]
    c = eval_g0(p, lam_tilde)[0]
    x0 = np.concatenate([r.x for r in project_all(p, lam0, gamma)])
    psi = psi_gamma(p, x0)
    lhs = a - c
    rhs = (b - c) + gamma * psi
    return Lemma1Check(lhs, rhs, lhs <= rhs + slack, psi, a - b, gamma * psi,
                       a - b <= gamma * psi + slack)


def quality_score(g0_lam, g0_0, g0_best):
    den = g0_best - g0_0
    if abs(den) < 1e-14:
        raise DegenerateAnchor("best and anchor g0 values coincide")
    return (g0_lam - g0_0) / den


@dataclass
class StageConfig:
    T: int = 4
    R: int = 20
    tau: float = 1.0
    gamma_floor: float = 1e-8
    max_repeats: int = 100
    monotone_gamma: bool = True  # never let gamma grow from one stage to the next
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    threads: Optional[int] = None


@dataclass
class StageRecord:
    stage: int
    eps: float
    gamma: float
    g_drop: float
    psi_a: float
    repeats: int
    g0: float
    stalled: bool = False


@dataclass
class StageResult:
    lam: np.ndarray
    g0: float
    g0_zero: float
    best_lam: np.ndarray
    best_g0: float
    stages: list
    rows: list  # one dict per optimizer iteration, RunTrace columns
    warnings: list
    psi_tilde: float

    def quality(self, g0_best=None):
        return quality_score(self.g0, self.g0_zero, self.best_g0 if g0_best is None else g0_best)


def stagewise_solve(p: Problem, cfg: Optional[StageConfig] = None, lam0=None) -> StageResult:
    """Run the stage-wise gamma schedule and return the final incumbent.

    Stages ``t = 1 .. T-1`` are run (three for the default ``T = 4``).
    """
    cfg = cfg or StageConfig()
    opt = replace(cfg.optimizer, max_iters=cfg.R)
    t_start = time.perf_counter()
    warnings = []
    g00 = eval_g0(p, np.zeros(p.m), cfg.threads)[0]
    ptil = psi_tilde(p.m, problem_delta(p))
    g_drop = cfg.tau * abs(g00)
    anchor = abs(g00)
    if g_drop == 0.0:
        warnings.append("g0(0) = 0: falling back to g_drop = 1")
        g_drop = anchor = 1.0
    gamma = max(0.5 * 1e-1 * anchor / ptil, cfg.gamma_floor)

    lam_tilde = np.zeros(p.m) if lam0 is None else np.maximum(np.asarray(lam0, float), 0.0)
    g0_tilde = eval_g0(p, lam_tilde, cfg.threads)[0]
    best_lam, best_g0 = lam_tilde.copy(), g0_tilde
    lam_bar = lam_tilde.copy()
    stages, rows = [], []
    ev0 = eval_dual(p, lam_bar, gamma, threads=cfg.threads)
    rows.append(_row(p, 0, 1, gamma, 0.1, lam_bar, ev0, 0.0, projected_grad_norm(lam_bar, ev0.grad),
                     t_start, cfg.threads))

    for t in range(1, cfg.T):
        eps = 10.0 ** (-t)
        repeats = 0
        stalled = False

        def on_iter(row_lam, ev, step, pg):
            nonlocal best_lam, best_g0
            rows.append(_row(p, len(rows), t, gamma, eps, row_lam, ev, step, pg, t_start,
                             cfg.threads))
            # intermediate iterates can beat every stage endpoint on g0
            if rows[-1]["g0"] > best_g0:
                best_lam, best_g0 = row_lam.copy(), rows[-1]["g0"]

        while True:
            lam_bar, trace = maximize_dual(p, gamma, lam_bar, opt, cfg.threads,
                                           callback=on_iter)
            g0_bar = eval_g0(p, lam_bar, cfg.threads)[0]
            repeats += 1
            if g0_bar > best_g0:
                best_lam, best_g0 = lam_bar.copy(), g0_bar
            if g0_bar - g0_tilde <= 0.5 * eps * g_drop:
                x0 = np.concatenate([r.x for r in project_all(p, lam_bar, gamma, cfg.threads)])
                psi_a = psi_gamma(p, x0)
                new_drop = g0_bar - g00
                if new_drop <= 0.0:
                    warnings.append(f"stage {t}: nonpositive g_drop {new_drop:.3g}; keeping {g_drop:.3g}")
                    stalled = True
                else:
                    g_drop = new_drop
                psi_used = psi_a if psi_a > 0.0 else ptil
                gamma_next = max(0.5 * 10.0 ** (-(t + 1)) * g_drop / psi_used, cfg.gamma_floor)
                if cfg.monotone_gamma:
                    gamma_next = min(gamma_next, gamma)
                stages.append(StageRecord(t, eps, gamma, g_drop, psi_a, repeats, g0_bar, stalled))
                lam_tilde, g0_tilde = lam_bar.copy(), g0_bar
                gamma = gamma_next
                break
            lam_tilde, g0_tilde = lam_bar.copy(), g0_bar
            if repeats >= cfg.max_repeats:
                msg = f"stage {t}: no sufficient convergence after {repeats} repeats"
                log.warning(msg)
                warnings.append(msg)
                stages.append(StageRecord(t, eps, gamma, g_drop, float("nan"), repeats, g0_bar, True))
                break

    res = StageResult(lam_tilde, g0_tilde, g00, best_lam, best_g0, stages, rows, warnings, ptil)
    _fill_quality(rows, g00, best_g0)
    return res


def _row(p, it, stage, gamma, eps, lam, ev, step, pg, t_start, threads):
    return {"iter": it, "stage": stage, "gamma": gamma, "eps": eps, "g_gamma": ev.g,
            "g0": eval_g0(p, lam, threads)[0], "grad_norm": pg, "step": step,
            "mu": ev.stats.mean_dim, "vertex_frac": ev.stats.vertex_fraction,
            "Q": float("nan"), "wall_ms": 1e3 * (time.perf_counter() - t_start)}


def _fill_quality(rows, g00, best_g0):
    # Q is undefined when no iterate ever improved on g0(0) (for instance a
    # problem whose budgets never bind); it is reported as 1 since lam = 0 is
    # then already optimal among the visited points
    degenerate = abs(best_g0 - g00) < 1e-14
    for r in rows:
        r["Q"] = 1.0 if degenerate else quality_score(r["g0"], g00, best_g0)


@dataclass
class FixedResult:
    lam: np.ndarray
    g: float
    g0: float
    g0_zero: float
    best_g0: float
    trace: object  # OptimizerTrace
    rows: list

    @property
    def converged(self):
        return self.trace.converged


def solve_fixed(p: Problem, gamma, cfg: Optional[OptimizerConfig] = None, lam0=None,
                threads=None) -> FixedResult:
    """Maximize ``g_gamma`` for one fixed ``gamma`` and record trace rows."""
    if not gamma > 0:
        raise InvalidGamma(f"gamma must be positive, got {gamma}")
    t_start = time.perf_counter()
    lam0 = np.zeros(p.m) if lam0 is None else np.maximum(np.asarray(lam0, float), 0.0)
    ev0 = eval_dual(p, lam0, gamma, threads=threads)
    rows = [_row(p, 0, 0, gamma, float("nan"), lam0, ev0, 0.0,
                 projected_grad_norm(lam0, ev0.grad), t_start, threads)]

    def on_iter(lam, ev, step, pg):
        rows.append(_row(p, len(rows), 0, gamma, float("nan"), lam, ev, step, pg, t_start, threads))

    lam, trace = maximize_dual(p, gamma, lam0, cfg, threads, callback=on_iter)
    g00 = eval_g0(p, np.zeros(p.m), threads)[0]
    g0_final = eval_g0(p, lam, threads)[0]
    best = max([g0_final] + [r["g0"] for r in rows])
    _fill_quality(rows, g00, best)
    return FixedResult(lam, trace.final.g, g0_final, g00, best, trace, rows)
