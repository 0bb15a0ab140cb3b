"""Wolfe's minimum-norm-point algorithm, run vertex-first.

The hull is accessed only through an oracle object exposing

``nearest(xhat)``
    identifier of the vertex closest to ``xhat``;
``linmin(eta)``
    identifier of a vertex minimizing ``eta @ v``;
``vertex(vid)``
    the vertex as a dense vector.

The point being projected is never translated to the origin; all updates
work on the original vertex coordinates.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateCorral, MaxIterationsExceeded
from .polytope import ProjectionResult

EPS_OPT = 1e-10
EPS_DROP = 1e-12


class VertexListOracle:
    """Oracle over an explicit ``(V, K)`` vertex array.  Ties go to the lowest row."""

    def __init__(self, vertices):
        self.vertices = np.asarray(vertices, dtype=float)
        self._sq = np.einsum("ij,ij->i", self.vertices, self.vertices)

    def nearest(self, xhat):
        return int(np.argmin(self._sq - 2.0 * (self.vertices @ xhat)))

    def linmin(self, eta):
        return int(np.argmin(self.vertices @ eta))

    def vertex(self, vid):
        return self.vertices[vid].copy()


@dataclass
class WolfeState:
    ids: list
    V: np.ndarray  # rows are the vertices of the current corral
    rho: np.ndarray
    x: np.ndarray
    major: int = 0
    minor: int = 0

    def result(self):
        return ProjectionResult(self.x, list(self.ids), self.rho.copy(), len(self.ids) - 1,
                                {"major": self.major, "minor": self.minor})


def optimality_check(x, xhat, oracle, eps=EPS_OPT):
    """Test whether ``x`` is the projection of ``xhat`` onto the hull.

    Returns ``(is_optimal, vid)`` where ``vid`` is the oracle's minimizer of
    ``(x - xhat) @ v`` when ``x`` is not optimal and ``None`` otherwise.
    """
    eta = x - xhat
    vid = oracle.linmin(eta)
    v = oracle.vertex(vid)
    if eta @ v >= eta @ x - eps * (1.0 + eta @ eta):
        return True, None
    return False, vid


def affine_minimizer(V, xhat):
    """Closest point to ``xhat`` in the affine hull of the rows of ``V``.

    Returns ``(y, alpha)`` with ``y = alpha @ V`` and ``alpha.sum() == 1``.
    """
    V = np.asarray(V, dtype=float)
    s = V.shape[0]
    if s == 1:
        return V[0].copy(), np.ones(1)
    M = np.zeros((s + 1, s + 1))
    M[:s, :s] = V @ V.T
    M[:s, s] = 1.0
    M[s, :s] = 1.0
    rhs = np.append(V @ xhat, 1.0)
    alpha = None
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            sol = scipy.linalg.solve(M, rhs, assume_a="sym")
        if np.all(np.isfinite(sol)) and (np.linalg.norm(M @ sol - rhs)
                                         <= 1e-8 * (1.0 + np.linalg.norm(rhs))):
            alpha = sol[:s]
    except (np.linalg.LinAlgError, ValueError):
        pass
    if alpha is None:
        # ridge-regularized least squares on the centered directions
        D = V[1:] - V[0]
        r = xhat - V[0]
        G = D @ D.T
        try:
            beta = np.linalg.solve(G + 1e-12 * np.eye(s - 1), D @ r)
        except np.linalg.LinAlgError:
            raise DegenerateCorral(f"singular corral system of size {s}") from None
        if not np.linalg.norm(G @ beta - D @ r) <= 1e-8 * (1.0 + np.linalg.norm(D @ r)):
            raise DegenerateCorral(f"affinely dependent corral of size {s}")
        alpha = np.concatenate(([1.0 - beta.sum()], beta))
    return alpha @ V, alpha


def minor_cycle_step(state, y, alpha):
    """Move from ``x`` toward ``y`` until the first weight hits zero, then drop it."""
    neg = np.flatnonzero(alpha < 0)
    rho = state.rho
    ratios = rho[neg] / (rho[neg] - alpha[neg])
    j = int(np.argmin(ratios))
    theta = ratios[j]
    rho = theta * alpha + (1.0 - theta) * rho
    rho[neg[j]] = 0.0
    keep = rho > EPS_DROP
    rho = rho[keep]
    rho /= rho.sum()
    state.ids = [vid for vid, k in zip(state.ids, keep) if k]
    state.V = state.V[keep]
    state.rho = rho
    state.x = rho @ state.V
    state.minor += 1
    return state


def wolfe_project(oracle, xhat, max_major=None):
    """Project ``xhat`` onto the hull behind ``oracle``.

    Starts from the nearest vertex and returns it untouched when it already
    passes the optimality test.  Raises ``MaxIterationsExceeded`` (carrying
    the current iterate) after ``max_major`` vertex insertions; the default
    budget is ``10 * K + 100``.
    """
    xhat = np.asarray(xhat, dtype=float)
    if max_major is None:
        max_major = 10 * xhat.size + 100
    vid = oracle.nearest(xhat)
    v = oracle.vertex(vid)
    state = WolfeState([vid], v[None, :], np.ones(1), v)
    dist = (v - xhat) @ (v - xhat)
    while True:
        ok, new = optimality_check(state.x, xhat, oracle)
        if ok or new in state.ids:
            break
        if state.major >= max_major:
            raise MaxIterationsExceeded(
                f"Wolfe projection did not converge in {max_major} major cycles",
                best=state.result())
        state.major += 1
        prev = (list(state.ids), state.V, state.rho, state.x)
        state.ids.append(new)
        state.V = np.vstack([state.V, oracle.vertex(new)])
        state.rho = np.append(state.rho, 0.0)
        while True:
            y, alpha = affine_minimizer(state.V, xhat)
            if alpha.min() >= 0.0:
                break
            minor_cycle_step(state, y, alpha)
        keep = alpha > EPS_DROP
        if not keep.all():
            alpha = alpha[keep]
            state.ids = [i for i, k in zip(state.ids, keep) if k]
            state.V = state.V[keep]
        state.rho = alpha / alpha.sum()
        state.x = state.rho @ state.V
        new_dist = (state.x - xhat) @ (state.x - xhat)
        if not new_dist < dist:
            # rounding stalled the descent; the previous corral is as good as it gets
            state.ids, state.V, state.rho, state.x = prev
            break
        dist = new_dist
    return state.result()
