"""Seeded synthetic instances.

All generators are pure functions of their arguments: the same spec and
seed always produce the same problem (and therefore the same file bytes).

Two marketplace shapes are provided.

matching
    each block is a member choosing among ``K`` items; ``c`` is a negated
    utility, ``A`` holds nonnegative per-item budget costs and every row is
    a ``<=`` budget.
diversity
    each block recommends exactly ``delta`` of ``K`` candidates (Box-Cut-Eq);
    the rows are minimum-exposure ``>=`` constraints stored negated.
"""

from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .polytope import Kind, PolytopeSpec, boxcut, box, parity, simplex
from .problem import make_problem
from .projections import linear_minimize


@dataclass
class MarketSpec:
    I: int = 100  # noqa: E741
    K: int = 10
    m: int = 5
    kind: str = "matching"
    density: float = 0.5
    polytope: str = "simplex_eq"
    delta: int = 2
    scale: float = 0.5
    margin: float = 1.1

    def __post_init__(self):
        if self.kind not in ("matching", "diversity"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.I < 1 or self.K < 1 or self.m < 0:
            raise ValueError("need I >= 1, K >= 1, m >= 0")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.scale <= 0 or self.margin < 1.0:
            raise ValueError("need scale > 0 and margin >= 1")
        Kind(self.polytope)


def _spec_for(name, K, delta):
    kind = Kind(name)
    if kind is Kind.BOX:
        return box()
    if kind in (Kind.SIMPLEX_EQ, Kind.SIMPLEX_IQ):
        return simplex(kind is Kind.SIMPLEX_EQ)
    if kind.is_boxcut:
        return boxcut(delta, kind is Kind.BOXCUT_EQ)
    if kind is Kind.PARITY:
        return parity()
    raise ValueError("generators do not produce general hulls")


def _coerce(spec, overrides):
    if spec is None:
        spec = {}
    if isinstance(spec, MarketSpec):
        spec = asdict(spec)
    spec = dict(spec)
    spec.update(overrides)
    seed = spec.pop("seed", 0)
    return MarketSpec(**spec), seed


def _sparse_costs(rng, m, K, density):
    mask = rng.random((m, K)) < density
    vals = rng.uniform(0.1, 1.0, (m, K))
    return sp.csc_matrix(np.where(mask, vals, 0.0))


def _cheapest_vertex(spec: PolytopeSpec, A_i):
    """Vertex spending the least total resource, ``argmin 1^T A_i v``."""
    return linear_minimize(spec, np.asarray(A_i.sum(axis=0)).ravel())[1]


def generate_marketplace(spec=None, seed=None, **overrides):
    """Random marketplace instance.

    ``spec`` is a :class:`MarketSpec`, a dict with the same keys (optionally
    containing ``seed``) or ``None``; keyword overrides take precedence.

    Budgets are set to ``max(scale * A xbar, margin * A x_f)`` row by row,
    where ``xbar`` is the unconstrained best vertex of every block and
    ``x_f`` the least resource-hungry one.  ``x_f`` is therefore always
    feasible while the ``scale`` term makes the budgets bind.
    """
    if seed is not None:
        overrides["seed"] = seed
    s, seed = _coerce(spec, overrides)
    rng = np.random.default_rng(seed)
    if s.kind == "diversity":
        return _diversity(s, seed, rng)
    pspec = _spec_for(s.polytope, s.K, s.delta)
    c_blocks, A_blocks = [], []
    use = np.zeros(s.m)
    floor = np.zeros(s.m)
    for _ in range(s.I):
        c = -rng.uniform(0.0, 1.0, s.K)
        A = _sparse_costs(rng, s.m, s.K, s.density)
        c_blocks.append(c)
        A_blocks.append(A)
        use += A @ linear_minimize(pspec, c)[1]
        floor += A @ _cheapest_vertex(pspec, A)
    b = np.maximum(s.scale * use, s.margin * floor)
    meta = {"generator": "matching", "seed": int(seed), **asdict(s)}
    return make_problem(c_blocks, A_blocks, b, [pspec] * s.I, meta)


def _diversity(s: MarketSpec, seed, rng):
    pspec = boxcut(s.delta, equality=True)
    c_blocks, A_blocks = [], []
    xbar_use = np.zeros(s.m)
    best_use = np.zeros(s.m)
    for _ in range(s.I):
        c = -rng.uniform(0.0, 1.0, s.K)
        A = -_sparse_costs(rng, s.m, s.K, s.density)  # -(a x) <= -b encodes a x >= b
        c_blocks.append(c)
        A_blocks.append(A)
        xbar_use += A @ linear_minimize(pspec, c)[1]
        best_use += A @ _cheapest_vertex(pspec, A)
    # the midpoint of the greedy and the most-exposing assignments is
    # feasible by convexity and usually leaves the rows binding
    b = 0.5 * xbar_use + 0.5 * best_use
    meta = {"generator": "diversity", "seed": int(seed), **asdict(s)}
    return make_problem(c_blocks, A_blocks, b, [pspec] * s.I, meta)


def generate_infeasible(spec=None, seed=None, **overrides):
    """Instance whose budgets cannot be met by any point of the Eq polytopes.

    Row 0 is a dense positive cost row with budget equal to half the
    smallest achievable usage ``sum_i min_v a_i.v``; since every Eq vertex
    has positive usage the LP is infeasible.  The remaining rows are as in
    :func:`generate_marketplace`.
    """
    if seed is not None:
        overrides["seed"] = seed
    s, seed = _coerce(spec, {"kind": "matching", **overrides})
    pspec = _spec_for(s.polytope, s.K, s.delta)
    if not pspec.kind.is_equality:
        raise ValueError("infeasible instances need an Eq polytope kind")
    if s.m < 1:
        raise ValueError("infeasible instances need m >= 1")
    rng = np.random.default_rng(seed)
    c_blocks, A_blocks = [], []
    min_use = 0.0
    use = np.zeros(s.m)
    for _ in range(s.I):
        c = -rng.uniform(0.0, 1.0, s.K)
        A = _sparse_costs(rng, s.m, s.K, s.density).toarray()
        A[0] = rng.uniform(0.5, 1.0, s.K)
        c_blocks.append(c)
        A_blocks.append(A)
        min_use += linear_minimize(pspec, A[0])[2]
        use += A @ linear_minimize(pspec, c)[1]
    b = s.scale * use
    b[0] = 0.5 * min_use
    meta = {"generator": "infeasible", "seed": int(seed), **asdict(s)}
    return make_problem(c_blocks, A_blocks, b, [pspec] * s.I, meta)
