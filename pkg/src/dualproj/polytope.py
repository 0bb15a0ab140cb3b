"""Polytope descriptions for the per-block constraint sets.

Every supported kind except ``GENERAL`` is a 0/1 polytope, so its vertices
are identified by the tuple of coordinates equal to one.  ``GENERAL`` hulls
identify vertices by their row index in the stored vertex array.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Optional

import numpy as np


class Kind(str, Enum):
    BOX = "box"
    SIMPLEX_EQ = "simplex_eq"
    SIMPLEX_IQ = "simplex_iq"
    BOXCUT_EQ = "boxcut_eq"
    BOXCUT_IQ = "boxcut_iq"
    PARITY = "parity"
    GENERAL = "general"

    @property
    def is_boxcut(self):
        return self in (Kind.BOXCUT_EQ, Kind.BOXCUT_IQ)

    @property
    def is_equality(self):
        return self in (Kind.SIMPLEX_EQ, Kind.BOXCUT_EQ)


@dataclass
class ProjectionResult:
    """Projection of a point onto one polytope together with its corral.

    ``support`` lists vertex identifiers and ``weights`` the convex
    coefficients over them; both are ``None`` when the corral is not tracked
    (box-type results off a vertex, where ``corral_dim`` counts the
    coordinates strictly inside ``(0, 1)``).
    """

    x: np.ndarray
    support: Optional[list]
    weights: Optional[np.ndarray]
    corral_dim: int
    stats: dict = field(default_factory=dict)

    @property
    def is_vertex(self):
        return self.corral_dim == 0


# Eq kind -> its Iq relaxation
RELAXED = {Kind.SIMPLEX_EQ: Kind.SIMPLEX_IQ, Kind.BOXCUT_EQ: Kind.BOXCUT_IQ}


@dataclass(frozen=True, eq=False)
class PolytopeSpec:
    """Constraint set of one block.

    Parameters
    ----------
    kind : Kind
    delta : int, optional
        Cut level for the box-cut kinds (``sum(x) = delta`` or ``<= delta``).
    vertices : ndarray, optional
        ``(V, K)`` array of hull vertices for ``Kind.GENERAL``.
    """

    kind: Kind
    delta: Optional[int] = None
    vertices: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.vertices is not None:
            v = np.array(self.vertices, dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, "vertices", v)

    def __eq__(self, other):
        if not isinstance(other, PolytopeSpec):
            return NotImplemented
        if self.kind != other.kind or self.delta != other.delta:
            return False
        if (self.vertices is None) != (other.vertices is None):
            return False
        return self.vertices is None or (
            self.vertices.shape == other.vertices.shape
            and bool(np.all(self.vertices == other.vertices)))

    __hash__ = None

    def violations(self, K):
        """Reasons this spec is unusable for a block of dimension ``K``."""
        out = []
        if K < 1:
            out.append("dimension K must be >= 1")
        if self.kind.is_boxcut:
            d = self.delta
            if d is None or int(d) != d:
                out.append("delta must be an integer")
            elif not 1 < d < K:
                out.append(f"delta out of range (need 1 < delta < K, got delta={d}, K={K})")
        elif self.delta is not None:
            out.append(f"delta given for non box-cut kind {self.kind.value}")
        if self.kind is Kind.PARITY and K < 2:
            out.append("parity polytope needs K >= 2")
        if self.kind is Kind.GENERAL:
            v = self.vertices
            if v is None or v.ndim != 2 or v.shape[0] == 0:
                out.append("general polytope needs a non-empty vertex list")
            elif v.shape[1] != K:
                out.append(f"vertex dimension {v.shape[1]} != K={K}")
            elif not np.all(np.isfinite(v)):
                out.append("non-finite vertex coordinates")
        elif self.vertices is not None:
            out.append(f"vertices given for kind {self.kind.value}")
        return out

    def delta_equiv(self, K):
        """Largest squared vertex norm (the ``delta`` used by the a-priori psi bound)."""
        k = self.kind
        if k in (Kind.SIMPLEX_EQ, Kind.SIMPLEX_IQ):
            return 1.0
        if k.is_boxcut:
            return float(self.delta)
        if k is Kind.BOX:
            return float(K)
        if k is Kind.PARITY:
            return float(2 * (K // 2))
        return float(np.max(np.sum(self.vertices ** 2, axis=1)))

    def max_half_sq_norm(self, K):
        """``max_{x in C} x.x / 2``; attained at a vertex since the norm is convex."""
        return 0.5 * self.delta_equiv(K)

    def vertex(self, vid, K):
        """Materialize the vertex with identifier ``vid``."""
        if self.kind is Kind.GENERAL:
            return np.array(self.vertices[vid], dtype=float)
        v = np.zeros(K)
        v[list(vid)] = 1.0
        return v

    def enumerate_vertices(self, K):
        """All ``(vid, vertex)`` pairs.  Exponential for most kinds; small K only."""
        k = self.kind
        if k is Kind.GENERAL:
            ids = list(range(len(self.vertices)))
        elif k is Kind.BOX:
            ids = [s for r in range(K + 1) for s in combinations(range(K), r)]
        elif k is Kind.SIMPLEX_EQ:
            ids = [(j,) for j in range(K)]
        elif k is Kind.SIMPLEX_IQ:
            ids = [()] + [(j,) for j in range(K)]
        elif k is Kind.BOXCUT_EQ:
            ids = list(combinations(range(K), self.delta))
        elif k is Kind.BOXCUT_IQ:
            ids = [s for r in range(self.delta + 1) for s in combinations(range(K), r)]
        else:
            ids = [s for r in range(0, K + 1, 2) for s in combinations(range(K), r)]
        return ids, np.array([self.vertex(i, K) for i in ids], dtype=float)


def box():
    return PolytopeSpec(Kind.BOX)


def simplex(equality=True):
    return PolytopeSpec(Kind.SIMPLEX_EQ if equality else Kind.SIMPLEX_IQ)


def boxcut(delta, equality=True):
    return PolytopeSpec(Kind.BOXCUT_EQ if equality else Kind.BOXCUT_IQ, delta=int(delta))


def parity():
    return PolytopeSpec(Kind.PARITY)


def hull(vertices):
    return PolytopeSpec(Kind.GENERAL, vertices=np.asarray(vertices, dtype=float))
