"""Exact desk-scale solvers used as test oracles.

None of these routines is meant to scale: they expand every block into an
explicit constraint (or convex-multiplier) representation and hand the
whole problem to an off-the-shelf solver.  They exist so that the first-order
machinery can be checked against independent answers.
"""

from itertools import combinations
from math import comb

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import Infeasible, ScaleExceeded
from .polytope import Kind, PolytopeSpec
from .problem import Problem

MAX_N = 500
MAX_VERTICES = 4096


# ---------------------------------------------------------------------------
# dense expansion shared by the LP and QP oracles
# ---------------------------------------------------------------------------

def _expand(p: Problem, max_n=MAX_N):
    """Variable layout for the expanded problem.

    Returns ``(nv, A_ub, b_ub, A_eq, b_eq, lift)`` where the first ``m``
    rows of ``A_ub`` are the coupling rows (in terms of the expanded
    variables) and ``lift`` is a sparse map from expanded variables to ``x``.
    """
    if p.n > max_n:
        raise ScaleExceeded(f"reference solvers handle n <= {max_n}, got n={p.n}")
    lift_blocks, ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], [], []
    col = 0
    sizes = []
    for blk in p.blocks:
        K, s = blk.K, blk.spec
        if s.kind in (Kind.PARITY, Kind.GENERAL):
            _, V = s.enumerate_vertices(K)
            if V.shape[0] > MAX_VERTICES:
                raise ScaleExceeded(f"block {blk.id}: {V.shape[0]} vertices is too many")
            nv = V.shape[0]
            lift_blocks.append(sp.csr_matrix(V.T))
            eq_rows.append((col, np.ones(nv)))
            eq_rhs.append(1.0)
        else:
            nv = K
            lift_blocks.append(sp.identity(K, format="csr"))
            total = {Kind.SIMPLEX_EQ: 1.0, Kind.SIMPLEX_IQ: 1.0}.get(s.kind, s.delta)
            if s.kind.is_equality:
                eq_rows.append((col, np.ones(K)))
                eq_rhs.append(float(total))
            elif s.kind is not Kind.BOX:
                ub_rows.append((col, np.ones(K)))
                ub_rhs.append(float(total))
        sizes.append(nv)
        col += nv
    nv = col
    lift = sp.block_diag(lift_blocks, format="csr") if lift_blocks else sp.csr_matrix((0, 0))

    def rows(spec_rows):
        M = sp.lil_matrix((len(spec_rows), nv))
        for r, (start, vals) in enumerate(spec_rows):
            M[r, start:start + vals.size] = vals
        return M.tocsr()

    coupling = (p.A @ lift).tocsr() if p.I else sp.csr_matrix((p.m, 0))
    A_ub = sp.vstack([coupling, rows(ub_rows)], format="csr")
    b_ub = np.concatenate([p.b, ub_rhs])
    A_eq = rows(eq_rows)
    return nv, A_ub, b_ub, A_eq, np.asarray(eq_rhs, float), lift


def reference_lp_solve(p: Problem, max_n=MAX_N):
    """Solve the LP exactly with the HiGHS dual simplex.

    Returns ``(x, f, lam)`` where ``lam >= 0`` are the multipliers of the
    coupling rows.  Raises :class:`Infeasible` when HiGHS proves
    infeasibility.
    """
    nv, A_ub, b_ub, A_eq, b_eq, lift = _expand(p, max_n)
    cost = lift.T @ p.c
    res = linprog(cost, A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if A_ub.shape[0] else None,
                  A_eq=A_eq if A_eq.shape[0] else None, b_eq=b_eq if A_eq.shape[0] else None,
                  bounds=(0.0, 1.0), method="highs-ds")
    if res.status == 2:
        raise Infeasible("reference LP solver proved infeasibility")
    if res.status != 0:
        raise RuntimeError(f"reference LP solve failed: {res.message}")
    x = lift @ res.x
    lam = np.maximum(-res.ineqlin.marginals[:p.m], 0.0)
    return x, float(p.c @ x), lam


def reference_qp_solve(p: Problem, gamma, max_n=MAX_N):
    """Solve ``min c.x + gamma/2 |x|^2`` over the LP's feasible set.

    Returns ``(x, f, lam)``; ``lam`` maximizes the smoothed dual and ``f``
    equals its optimal value by strong duality.
    """
    import cvxpy as cp

    if not gamma > 0:
        raise ValueError("gamma must be positive")
    nv, A_ub, b_ub, A_eq, b_eq, lift = _expand(p, max_n)
    w = cp.Variable(nv)
    x = lift @ w
    coupling = A_ub[:p.m] @ w <= b_ub[:p.m]
    cons = [coupling, w >= 0, w <= 1]
    if A_ub.shape[0] > p.m:
        cons.append(A_ub[p.m:] @ w <= b_ub[p.m:])
    if A_eq.shape[0]:
        cons.append(A_eq @ w == b_eq)
    prob = cp.Problem(cp.Minimize(p.c @ x + 0.5 * gamma * cp.sum_squares(x)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-11, tol_gap_rel=1e-11, tol_feas=1e-11,
               max_iter=500)
    if prob.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        raise Infeasible("reference QP solver proved infeasibility")
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise RuntimeError(f"reference QP solve failed: {prob.status}")
    xv = lift @ w.value
    lam = np.maximum(np.asarray(coupling.dual_value, float).ravel(), 0.0)
    return xv, float(p.c @ xv + 0.5 * gamma * xv @ xv), lam


# ---------------------------------------------------------------------------
# exact projections
# ---------------------------------------------------------------------------

def _capped_sum_projection(xhat, s):
    """Projection onto ``{0 <= x <= 1, sum(x) = s}`` by locating the threshold.

    The solution is ``clip(xhat - theta, 0, 1)``; ``h(theta) = sum(...)`` is
    piecewise linear and nonincreasing with kinks at ``xhat`` and
    ``xhat - 1``, so ``theta`` is found by bracketing between kinks and then
    recomputed from the free coordinates.
    """
    def h(theta):
        return float(np.clip(xhat - theta, 0.0, 1.0).sum())

    kinks = np.unique(np.concatenate([xhat, xhat - 1.0]))
    vals = np.array([h(k) for k in kinks])  # nonincreasing in theta
    # vals[0] = K (all capped at one) and vals[-1] = 0
    j = int(np.searchsorted(-vals, -s, side="left"))
    if j < kinks.size and vals[j] == s:
        theta = kinks[j]
    else:
        lo, hi = kinks[j - 1], kinks[j]
        theta = lo + (vals[j - 1] - s) * (hi - lo) / (vals[j - 1] - vals[j])
    y = xhat - theta
    free = (y > 0.0) & (y < 1.0)
    if free.any():
        upper = np.count_nonzero(y >= 1.0)
        theta = (xhat[free].sum() + upper - s) / np.count_nonzero(free)
    return np.clip(xhat - theta, 0.0, 1.0)


def _parity_projection(xhat):
    K = xhat.size
    z = np.clip(xhat, 0.0, 1.0)
    f = z > 0.5
    if np.count_nonzero(f) % 2 == 0:
        k = int(np.argmin(np.abs(z - 0.5)))
        f[k] = not f[k]
    theta = np.where(f, 1.0, -1.0)
    if theta @ z <= np.count_nonzero(f) - 1:
        return z
    # the nearest point lies on the facet theta.x = |f| - 1; flipping the
    # coordinates with theta = -1 turns it into sum(w) = K - 1 inside the box
    w = _capped_sum_projection(np.where(f, xhat, 1.0 - xhat), K - 1.0)
    return np.where(f, w, 1.0 - w)


def _hull_projection(xhat, V, max_subsets):
    N, K = V.shape
    total = sum(comb(N, r) for r in range(1, min(N, K + 1) + 1))
    if total > max_subsets:
        raise ScaleExceeded(f"{total} vertex subsets exceed the limit {max_subsets}")
    best, best_d = None, np.inf
    for r in range(1, min(N, K + 1) + 1):
        for S in combinations(range(N), r):
            P = V[list(S)]
            if r == 1:
                y = P[0]
            else:
                D = (P[1:] - P[0]).T
                if np.linalg.matrix_rank(D) < r - 1:
                    continue
                a = np.linalg.lstsq(D, xhat - P[0], rcond=None)[0]
                if a.min() < -1e-12 or a.sum() > 1.0 + 1e-12:
                    continue
                y = P[0] + D @ a
            d = float(np.sum((y - xhat) ** 2))
            if d < best_d:
                best, best_d = y, d
    return best


def reference_qp_project(spec: PolytopeSpec, xhat, max_K=10, max_subsets=200_000):
    """Exact Euclidean projection by independent means.

    Box, simplex and box-cut kinds are solved by locating the KKT threshold,
    parity by its facet description, and vertex-listed hulls by scanning
    the affine least-squares point of every vertex subset of size at most
    ``K + 1``.
    """
    xhat = np.asarray(xhat, dtype=float)
    K = xhat.size
    if K > max_K:
        raise ScaleExceeded(f"reference projection handles K <= {max_K}, got {K}")
    k = spec.kind
    if k is Kind.BOX:
        return np.clip(xhat, 0.0, 1.0)
    if k is Kind.GENERAL:
        return _hull_projection(xhat, spec.vertices, max_subsets)
    if k is Kind.PARITY:
        return _parity_projection(xhat)
    total = 1.0 if k in (Kind.SIMPLEX_EQ, Kind.SIMPLEX_IQ) else float(spec.delta)
    if not k.is_equality:
        z = np.clip(xhat, 0.0, 1.0)
        if z.sum() <= total:
            return z
    return _capped_sum_projection(xhat, total)
