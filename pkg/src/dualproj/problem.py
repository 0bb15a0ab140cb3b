"""Block-structured LP instances.

The LP is ``min c.x  s.t.  A x <= b,  x_i in C_i`` where ``x`` is the
concatenation of the block vectors ``x_i``.  Each block keeps its own slice
``c_i`` and the sparse column slice ``A_i``; the problem caches the stacked
``A`` in CSC form so that products accumulate column by column in block
order, independently of how the per-block work was scheduled.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError
from .polytope import PolytopeSpec
from .projections import project


def _as_csc(A, m=None, K=None):
    if sp.issparse(A):
        A = sp.csc_matrix(A, dtype=float)
    else:
        A = np.asarray(A, dtype=float)
        if A.ndim == 1 and m is not None:
            A = A.reshape(m, -1)
        A = sp.csc_matrix(A)
    A.sum_duplicates()
    A.sort_indices()
    return A


@dataclass(frozen=True, eq=False)
class Block:
    id: int
    c: np.ndarray
    A: sp.csc_matrix
    spec: PolytopeSpec

    def __post_init__(self):
        c = np.array(self.c, dtype=float).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", _as_csc(self.A))

    @property
    def K(self):
        return self.c.size

    def triplets(self):
        """``(row, col, value)`` arrays sorted by (col, row)."""
        A = self.A
        cols = np.repeat(np.arange(A.shape[1]), np.diff(A.indptr))
        return A.indices.copy(), cols, A.data.copy()


@dataclass(frozen=True, eq=False)
class Problem:
    blocks: tuple
    b: np.ndarray
    metadata: Optional[dict] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        b = np.array(self.b, dtype=float).ravel()
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @property
    def I(self):  # noqa: E743
        return len(self.blocks)

    @property
    def m(self):
        return self.b.size

    @cached_property
    def offsets(self):
        return np.concatenate(([0], np.cumsum([blk.K for blk in self.blocks]))).astype(int)

    @property
    def n(self):
        return int(self.offsets[-1])

    @cached_property
    def A(self):
        if not self.blocks:
            return sp.csc_matrix((self.m, 0))
        return _as_csc(sp.hstack([blk.A for blk in self.blocks], format="csc"))

    @cached_property
    def c(self):
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([blk.c for blk in self.blocks])

    def split(self, x):
        """Views of ``x`` for each block."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionError(f"expected a vector of length n={self.n}, got shape {x.shape}")
        o = self.offsets
        return [x[o[i]:o[i + 1]] for i in range(self.I)]

    def with_specs(self, specs):
        """Same data with each block's polytope replaced."""
        blocks = [Block(blk.id, blk.c, blk.A, s) for blk, s in zip(self.blocks, specs)]
        return Problem(blocks, self.b, self.metadata)


def make_problem(c_blocks, A_blocks, b, specs, metadata=None):
    """Build a :class:`Problem` from per-block lists (dense or sparse ``A_i``)."""
    b = np.asarray(b, dtype=float).ravel()
    blocks = [Block(i, c, _as_csc(A, b.size), s)
              for i, (c, A, s) in enumerate(zip(c_blocks, A_blocks, specs))]
    return Problem(blocks, b, metadata)


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_problem(p: Problem) -> ValidationReport:
    """Collect every structural violation as ``(block_id, reason)`` pairs."""
    out = []
    if p.I == 0:
        out.append((None, "I=0: problem has no blocks"))
    if not np.all(np.isfinite(p.b)):
        out.append((None, "b has non-finite entries"))
    for pos, blk in enumerate(p.blocks):
        if blk.id != pos:
            out.append((blk.id, f"block ids must be unique and contiguous (position {pos})"))
        if not np.all(np.isfinite(blk.c)):
            out.append((blk.id, "c has non-finite entries"))
        if blk.A.shape[1] != blk.K:
            out.append((blk.id, f"dimension mismatch: A has {blk.A.shape[1]} columns, K={blk.K}"))
        if blk.A.shape[0] != p.m:
            out.append((blk.id, f"dimension mismatch: A has {blk.A.shape[0]} rows, m={p.m}"))
        if not np.all(np.isfinite(blk.A.data)):
            out.append((blk.id, "A has non-finite entries"))
        out.extend((blk.id, r) for r in blk.spec.violations(blk.K))
    return ValidationReport(out)


def residual(p: Problem, x) -> np.ndarray:
    """``A x - b``."""
    p.split(x)
    return p.A @ np.asarray(x, dtype=float) - p.b


def objective(p: Problem, x, gamma=0.0) -> float:
    """``c.x + gamma/2 x.x``."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    p.split(x)
    x = np.asarray(x, dtype=float)
    return float(p.c @ x + 0.5 * gamma * (x @ x))


def block_distances(p: Problem, x):
    """Euclidean distance of each block slice to its polytope."""
    return np.array([np.linalg.norm(xi - project(blk.spec, xi).x)
                     for blk, xi in zip(p.blocks, p.split(x))])


def is_feasible(p: Problem, x, tol=1e-9):
    """Return ``(feasible, max_violation)``.

    The violation is the largest of the coupling-row excesses and the block
    distances to their polytopes.
    """
    viol = max(0.0, float(np.max(residual(p, x), initial=0.0)))
    if p.I:
        viol = max(viol, float(np.max(block_distances(p, x))))
    return viol <= tol, viol
