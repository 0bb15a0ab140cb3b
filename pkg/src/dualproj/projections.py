"""Specialized projections and vertex oracles for the structured polytopes.

Vertex identifiers for the 0/1 polytopes are sorted tuples of the
coordinates set to one (so ``()`` is the origin and ``(k,)`` the k-th unit
vector).  All argmax / top-delta selections break ties toward the smallest
index.
"""

import heapq

import numpy as np

from .errors import DimensionError
from .polytope import Kind, PolytopeSpec, ProjectionResult
from .wolfe import VertexListOracle, wolfe_project


def _check_delta(delta, K):
    if int(delta) != delta or not 1 < delta < K:
        raise ValueError(f"delta out of range: need 1 < delta < K, got delta={delta}, K={K}")
    return int(delta)


def _as_vec(xhat):
    x = np.asarray(xhat, dtype=float)
    if x.ndim != 1:
        raise DimensionError("expected a 1-d vector")
    return x


def _box_result(x):
    interior = int(np.count_nonzero((x > 0.0) & (x < 1.0)))
    if interior:
        return ProjectionResult(x, None, None, interior)
    vid = tuple(np.flatnonzero(x == 1.0).tolist())
    return ProjectionResult(x, [vid], np.ones(1), 0)


def project_box(xhat):
    """Clamp to the unit box."""
    return _box_result(np.clip(_as_vec(xhat), 0.0, 1.0))


def project_simplex_eq(xhat):
    """Projection onto ``{x >= 0, sum(x) = 1}``, growing the support from the top.

    Indices enter in decreasing order of ``xhat`` from a lazily popped heap
    and the loop stops at the first candidate that would get a nonpositive
    coordinate, so only ``|support| + 1`` heap pops are ever made.
    """
    xhat = _as_vec(xhat)
    K = xhat.size
    if K == 0:
        raise DimensionError("simplex projection needs K >= 1")
    heap = [(-v, k) for k, v in enumerate(xhat.tolist())]
    heapq.heapify(heap)
    top, k1 = heapq.heappop(heap)
    support, total, pops = [k1], -top, 1
    while heap:
        neg, k = heapq.heappop(heap)
        pops += 1
        alpha = -neg - (total - neg - 1.0) / (len(support) + 1)
        if alpha <= 0.0:
            break
        support.append(k)
        total -= neg
    theta = (total - 1.0) / len(support)
    idx = np.array(support)
    x = np.zeros(K)
    x[idx] = xhat[idx] - theta
    return ProjectionResult(x, [(k,) for k in support], x[idx].copy(), len(support) - 1,
                            {"heap_pops": pops})


def project_simplex_iq(xhat):
    xhat = _as_vec(xhat)
    xb = np.clip(xhat, 0.0, 1.0)
    if xb.sum() <= 1.0:
        return _box_result(xb)
    return project_simplex_eq(xhat)


def top_indices(eta, d):
    """Indices of the ``d`` largest entries of ``eta`` in O(K) expected time."""
    K = eta.size
    if d <= 0:
        return ()
    if d >= K:
        return tuple(range(K))
    kth = np.partition(eta, K - d)[K - d]
    above = np.flatnonzero(eta > kth)
    ties = np.flatnonzero(eta == kth)[: d - above.size]
    return tuple(sorted(above.tolist() + ties.tolist()))


def boxcut_vertex_oracle(eta, delta):
    """Box-cut vertex maximizing ``eta @ v``: the top-``delta`` coordinates."""
    eta = _as_vec(eta)
    return top_indices(eta, _check_delta(delta, eta.size))


class BoxCutOracle:
    def __init__(self, K, delta):
        self.K = K
        self.delta = _check_delta(delta, K)

    def nearest(self, xhat):
        # |v - xhat|^2 = delta + |xhat|^2 - 2 xhat.v
        return top_indices(xhat, self.delta)

    def linmin(self, eta):
        return top_indices(-eta, self.delta)

    def vertex(self, vid):
        v = np.zeros(self.K)
        v[list(vid)] = 1.0
        return v


def project_boxcut_eq(xhat, delta):
    xhat = _as_vec(xhat)
    return wolfe_project(BoxCutOracle(xhat.size, delta), xhat)


def project_boxcut_iq(xhat, delta):
    xhat = _as_vec(xhat)
    delta = _check_delta(delta, xhat.size)
    xb = np.clip(xhat, 0.0, 1.0)
    if xb.sum() <= delta:
        return _box_result(xb)
    return project_boxcut_eq(xhat, delta)


def parity_vertex_oracle(eta):
    """Even-weight binary vector maximizing ``eta @ v``, in one scan of ``eta``."""
    eta = _as_vec(eta)
    pos = eta > 0.0
    P = np.flatnonzero(pos)
    if P.size % 2 == 0:
        return tuple(P.tolist())
    i1 = P[np.argmin(eta[P])]
    rest = np.flatnonzero(~pos)
    if rest.size:
        i2 = rest[np.argmax(eta[rest])]
        if eta[i1] + eta[i2] > 0.0:
            return tuple(sorted(P.tolist() + [int(i2)]))
    return tuple(k for k in P.tolist() if k != i1)


def parity_nearest_vertex(xhat):
    # for binary v, |v|^2 = sum(v), so the nearest vertex maximizes (xhat - 1/2).v
    return parity_vertex_oracle(_as_vec(xhat) - 0.5)


class ParityOracle:
    def __init__(self, K):
        self.K = K

    def nearest(self, xhat):
        return parity_nearest_vertex(xhat)

    def linmin(self, eta):
        return parity_vertex_oracle(-eta)

    def vertex(self, vid):
        v = np.zeros(self.K)
        v[list(vid)] = 1.0
        return v


def project_parity(xhat):
    xhat = _as_vec(xhat)
    if xhat.size < 2:
        raise DimensionError("parity polytope needs K >= 2")
    return wolfe_project(ParityOracle(xhat.size), xhat)


def project_general(xhat, vertices):
    return wolfe_project(VertexListOracle(vertices), _as_vec(xhat))


def project(spec: PolytopeSpec, xhat) -> ProjectionResult:
    """Dispatch to the projection for ``spec.kind``."""
    k = spec.kind
    if k is Kind.BOX:
        return project_box(xhat)
    if k is Kind.SIMPLEX_EQ:
        return project_simplex_eq(xhat)
    if k is Kind.SIMPLEX_IQ:
        return project_simplex_iq(xhat)
    if k is Kind.BOXCUT_EQ:
        return project_boxcut_eq(xhat, spec.delta)
    if k is Kind.BOXCUT_IQ:
        return project_boxcut_iq(xhat, spec.delta)
    if k is Kind.PARITY:
        return project_parity(xhat)
    return project_general(xhat, spec.vertices)


def linear_minimize(spec: PolytopeSpec, s):
    """Vertex of the polytope minimizing ``s @ x``.

    Returns ``(vid, x, value)``.
    """
    s = _as_vec(s)
    K = s.size
    k = spec.kind
    if k is Kind.GENERAL:
        vals = spec.vertices @ s
        vid = int(np.argmin(vals))
        return vid, np.array(spec.vertices[vid], dtype=float), float(vals[vid])
    if k is Kind.BOX:
        vid = tuple(np.flatnonzero(s < 0.0).tolist())
    elif k is Kind.SIMPLEX_EQ:
        vid = (int(np.argmin(s)),)
    elif k is Kind.SIMPLEX_IQ:
        j = int(np.argmin(s))
        vid = (j,) if s[j] < 0.0 else ()
    elif k is Kind.BOXCUT_EQ:
        vid = top_indices(-s, spec.delta)
    elif k is Kind.BOXCUT_IQ:
        neg = int(np.count_nonzero(s < 0.0))
        vid = top_indices(-s, min(neg, spec.delta))
    else:
        vid = parity_vertex_oracle(-s)
    x = np.zeros(K)
    x[list(vid)] = 1.0
    return vid, x, float(s[list(vid)].sum()) if vid else 0.0


def linear_maximize(spec: PolytopeSpec, s):
    vid, x, val = linear_minimize(spec, -_as_vec(s))
    return vid, x, -val
