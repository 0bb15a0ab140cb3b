"""Certificates and sanity checks around a dual solve.

* an a-priori upper bound on ``g_gamma`` for feasible problems, which turns
  any larger dual value into a proof of primal infeasibility;
* a relaxed (Eq -> Iq) reference value ``G`` used as an early warning;
* a shrink-to-feasible repair, the penalized objective and the weak-duality
  gap for problems with nonnegative ``A`` and ``b``;
* a greedy primal baseline.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dual import eval_g0
from .errors import BaselineInfeasible, InfeasibleCandidate, RepairUnavailable, ScaleExceeded
from .optimizers import OptimizerConfig, maximize_dual
from .polytope import RELAXED, Kind, PolytopeSpec
from .problem import Problem, is_feasible, residual
from .projections import linear_maximize

SHRINKABLE = (Kind.BOX, Kind.SIMPLEX_IQ, Kind.BOXCUT_IQ)


class Status(str, enum.Enum):
    PROVEN = "ProvenInfeasible"
    SUSPECTED = "SuspectedInfeasible"
    NONE = "NoEvidence"


@dataclass
class InfeasibilityVerdict:
    status: Status
    bound: float
    max_g_seen: float
    relaxed_reference: Optional[float] = None

    def to_dict(self):
        return {"status": self.status.value, "bound": self.bound, "max_g_seen": self.max_g_seen,
                "relaxed_reference": self.relaxed_reference}


@dataclass
class GapReport:
    x: np.ndarray
    gap: float  # c.x - g0(lam)
    primal: float
    dual: float
    penalized: float
    greedy: Optional[float] = None

    def to_dict(self):
        return {"gap": self.gap, "primal": self.primal, "dual": self.dual,
                "penalized": self.penalized, "greedy": self.greedy}


def block_upper_bound(spec: PolytopeSpec, c, gamma):
    """``max_{x in C} c.x + gamma/2 x.x``.

    The function is convex so the maximum sits at a vertex; for 0/1 vertices
    ``x.x = sum(x)`` and the problem is linear in ``c + gamma/2``.
    """
    c = np.asarray(c, dtype=float)
    if spec.kind is Kind.GENERAL:
        V = spec.vertices
        return float(np.max(V @ c + 0.5 * gamma * np.sum(V * V, axis=1)))
    return linear_maximize(spec, c + 0.5 * gamma)[2]


def infeasibility_bound(p: Problem, gamma=0.0):
    """``sum_i B_i`` with ``B_i`` the largest smoothed cost over block ``i``.

    For a feasible problem every ``g_gamma(lam)`` is at most the smoothed
    primal value of a feasible point, hence at most this bound.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return float(sum(block_upper_bound(blk.spec, blk.c, gamma) for blk in p.blocks))


def check_infeasible(trace, bound, G=None, suspect_factor=2.0, window=10):
    """Classify a run from its sequence of ``g_gamma`` values.

    ``trace`` is either a sequence of values or an object with a ``g``
    attribute/method returning them.  ``SuspectedInfeasible`` requires the
    last value to exceed ``G + (suspect_factor - 1) |G|`` and to still be
    above the value ``window`` steps earlier.
    """
    g = getattr(trace, "g", trace)
    g = np.asarray(g() if callable(g) else g, dtype=float)
    if g.size == 0:
        return InfeasibilityVerdict(Status.NONE, float(bound), float("-inf"), G)
    top = float(np.max(g))
    if top > bound:
        return InfeasibilityVerdict(Status.PROVEN, float(bound), top, G)
    if G is not None and g.size > 1:
        threshold = G + (suspect_factor - 1.0) * abs(G)
        earlier = g[max(0, g.size - 1 - window)]
        if g[-1] > threshold and g[-1] > earlier:
            return InfeasibilityVerdict(Status.SUSPECTED, float(bound), top, G)
    return InfeasibilityVerdict(Status.NONE, float(bound), top, G)


def relax(p: Problem) -> Problem:
    """Replace every Eq block by its Iq counterpart."""
    specs = []
    for blk in p.blocks:
        s = blk.spec
        if s.kind in RELAXED:
            s = PolytopeSpec(RELAXED[s.kind], s.delta)
        specs.append(s)
    return p.with_specs(specs)


def relaxation_reference(p: Problem, gamma, cfg: Optional[OptimizerConfig] = None, threads=None):
    """Maximum of ``g_gamma`` for the relaxed problem (found by the optimizer)."""
    _, trace = maximize_dual(relax(p), gamma, None, cfg, threads)
    return trace.final.g


def _require_nonnegative(p: Problem):
    if np.any(p.b < 0) or np.any(p.A.data < 0):
        raise RepairUnavailable("repair needs nonnegative A and b")


def repair_to_feasible(p: Problem, x, tol=1e-9):
    """Shrink the blocks feeding violated rows until ``A x <= b``.

    Row ``j`` gets the factor ``beta_j = b_j / (A x)_j``; each block is
    scaled by the smallest factor among the violated rows it touches.  Only
    polytopes closed under shrinking toward the origin are eligible.
    """
    _require_nonnegative(p)
    x = np.array(x, dtype=float)
    Ax = p.A @ x
    viol = Ax > p.b + tol
    if not viol.any():
        return x
    beta = np.ones(p.m)
    beta[viol] = p.b[viol] / Ax[viol]
    o = p.offsets
    for i, blk in enumerate(p.blocks):
        xi = x[o[i]:o[i + 1]]
        rows = np.unique(blk.A[:, xi > 0].indices)
        rows = rows[viol[rows]]
        if rows.size == 0:
            continue
        if blk.spec.kind not in SHRINKABLE:
            raise RepairUnavailable(f"block {blk.id} ({blk.spec.kind.value}) cannot be scaled down")
        xi *= beta[rows].min()
    if not is_feasible(p, x, tol)[0]:  # rounding can leave a sliver; cut once more
        Ax = p.A @ x
        over = Ax > p.b
        if over.any():
            x *= float(np.min(p.b[over] / Ax[over]))
    return x


def penalized_objective(p: Problem, x):
    """``c.x`` plus the total budget overrun."""
    x = np.asarray(x, dtype=float)
    return float(p.c @ x + np.maximum(residual(p, x), 0.0).sum())


def weak_duality_gap(p: Problem, x, lam, tol=1e-9, threads=None) -> GapReport:
    """``c.x - g0(lam)`` for a feasible ``x``; nonnegative by weak duality."""
    ok, v = is_feasible(p, x, tol)
    if not ok:
        raise InfeasibleCandidate(f"candidate violates constraints by {v:.3g}")
    x = np.asarray(x, dtype=float)
    primal = float(p.c @ x)
    dual = eval_g0(p, np.maximum(np.asarray(lam, float), 0.0), threads)[0]
    return GapReport(x, primal - dual, primal, dual, penalized_objective(p, x))


def _scan(cands, c, A, room):
    best, best_val = None, np.inf
    for v in cands:
        if np.all(A @ v <= room):
            val = float(c @ v)
            if val < best_val:
                best, best_val = v, val
    return best


def _greedy_block(blk, room):
    s, c, A, K = blk.spec, blk.c, blk.A, blk.K
    k = s.kind
    if k in (Kind.SIMPLEX_EQ, Kind.SIMPLEX_IQ):
        cands = list(np.eye(K))
        if k is Kind.SIMPLEX_IQ:
            cands.append(np.zeros(K))
        return _scan(cands, c, A, room)
    if k in (Kind.GENERAL, Kind.PARITY):
        if k is Kind.PARITY and K > 16:
            raise ScaleExceeded("greedy parity scan is limited to K <= 16")
        return _scan(s.enumerate_vertices(K)[1], c, A, room)
    # box-like kinds: add items by increasing cost while they fit
    need = s.delta if k is Kind.BOXCUT_EQ else 0
    cap = K if k is Kind.BOX else s.delta
    x = np.zeros(K)
    used = np.zeros(A.shape[0])
    chosen = 0
    for j in np.argsort(c, kind="stable"):
        if chosen >= cap or (c[j] >= 0 and chosen >= need):
            break
        col = A[:, [j]].toarray().ravel()
        if np.all(used + col <= room):
            x[j] = 1.0
            used += col
            chosen += 1
    if chosen < need:
        return None
    return x


def greedy_baseline(p: Problem):
    """Block-by-block greedy primal point.

    Blocks are visited in order and each takes its cheapest vertex that
    keeps the running usage within the budgets.  Returns ``(x, c.x)``.
    """
    room = p.b.astype(float).copy()
    parts = []
    for blk in p.blocks:
        v = _greedy_block(blk, room + 1e-12)
        if v is None:
            raise BaselineInfeasible(f"block {blk.id}: no vertex fits the remaining budgets")
        room -= blk.A @ v
        parts.append(v)
    x = np.concatenate(parts) if parts else np.zeros(0)
    return x, float(p.c @ x)


def gap_report(p: Problem, lam, x=None, threads=None) -> GapReport:
    """Weak-duality report for a dual point.

    With no candidate, the vertex minimizer of the Lagrangian at ``lam`` is
    used.  An infeasible candidate is repaired; when repair is unavailable
    (Eq blocks) the greedy point takes its place if it exists.  The greedy
    baseline objective is attached when available.
    """
    try:
        xg, greedy = greedy_baseline(p)
    except (BaselineInfeasible, ScaleExceeded):
        xg, greedy = None, None
    if x is None:
        x = eval_g0(p, lam, threads)[1]
    penalized = penalized_objective(p, x)
    if not is_feasible(p, x)[0]:
        try:
            x = repair_to_feasible(p, x)
        except RepairUnavailable:
            if xg is None:
                raise
            x = xg
    rep = weak_duality_gap(p, x, lam, threads=threads)
    rep.penalized = penalized
    rep.greedy = greedy
    return rep


def diagnose_infeasibility(p: Problem, gamma=0.1, cfg: Optional[OptimizerConfig] = None,
                           threads=None, suspect_factor=2.0, with_reference=True):
    """Run the dual ascent and classify the problem.

    The run stops as soon as ``g_gamma`` exceeds :func:`infeasibility_bound`.
    When ``with_reference`` is set and the problem has Eq blocks, the relaxed
    value ``G`` is computed as well so that a run that outgrows it can be
    flagged as suspicious.
    """
    cfg = cfg or OptimizerConfig(max_iters=5000)
    bound = infeasibility_bound(p, gamma)
    _, trace = maximize_dual(p, gamma, None, cfg, threads,
                             callback=lambda lam, ev, step, pg: ev.g > bound)
    G = None
    if with_reference and any(blk.spec.kind in RELAXED for blk in p.blocks):
        G = relaxation_reference(p, gamma, cfg, threads)
    return check_infeasible(trace, bound, G, suspect_factor)


__all__ = ["Status", "InfeasibilityVerdict", "GapReport", "infeasibility_bound", "check_infeasible",
           "relax", "relaxation_reference", "repair_to_feasible", "penalized_objective",
           "weak_duality_gap", "greedy_baseline", "gap_report", "block_upper_bound",
           "diagnose_infeasibility"]
