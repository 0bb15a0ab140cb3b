"""Smoothed Lagrangian dual of the block LP.

For ``gamma > 0``::

    g_gamma(lam) = min_{x in C} c.x + gamma/2 x.x + lam.(A x - b)

is attained at the blockwise projections of ``-(A_i^T lam + c_i) / gamma``
and its gradient is ``A x* - b``.  ``g_0`` (``gamma = 0``) is evaluated with
the linear-minimization oracles instead.

Blocks are farmed out to a thread pool in contiguous chunks; every
reduction happens afterwards on the calling thread in block order, so the
results do not depend on the worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import InvalidGamma
from .problem import Problem, objective, residual
from .projections import linear_minimize, project

THREADS_ENV = "DUALPROJ_THREADS"


@dataclass
class CorralStats:
    mean_dim: float
    vertex_count: int
    histogram: np.ndarray  # histogram[d] = number of blocks with corral dimension d
    I: int  # noqa: E741

    @property
    def vertex_fraction(self):
        return self.vertex_count / self.I if self.I else 1.0


@dataclass
class DualEvaluation:
    lam: np.ndarray
    gamma: float
    g: float
    grad: np.ndarray
    stats: CorralStats
    x: Optional[np.ndarray] = None


def corral_stats(results) -> CorralStats:
    dims = np.array([r.corral_dim for r in results], dtype=int)
    if dims.size == 0:
        return CorralStats(0.0, 0, np.zeros(1, dtype=int), 0)
    return CorralStats(float(dims.sum() / dims.size), int(np.count_nonzero(dims == 0)),
                       np.bincount(dims), int(dims.size))


def resolve_threads(threads=None):
    if threads is None:
        threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(threads))


@lru_cache(maxsize=None)
def _pool(n):
    return ThreadPoolExecutor(max_workers=n, thread_name_prefix="dualproj")


def _check(lam, gamma, m):
    if not gamma > 0:
        raise InvalidGamma(f"gamma must be positive, got {gamma}")
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (m,):
        raise ValueError(f"lambda must have length m={m}")
    return lam


def block_argmin(block, lam, gamma):
    """Minimizer of the smoothed Lagrangian over one block."""
    if not gamma > 0:
        raise InvalidGamma(f"gamma must be positive, got {gamma}")
    xhat = -(block.A.T @ np.asarray(lam, dtype=float) + block.c) / gamma
    return project(block.spec, xhat)


def _map_blocks(fn, p, items, threads):
    I = p.I  # noqa: E741
    threads = min(resolve_threads(threads), max(I, 1))
    if threads == 1:
        return [fn(blk, it) for blk, it in zip(p.blocks, items)]
    bounds = np.linspace(0, I, threads + 1).astype(int)

    def run(lo, hi):
        return [fn(p.blocks[i], items[i]) for i in range(lo, hi)]

    futures = [_pool(threads).submit(run, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    out = []
    for f in futures:
        out.extend(f.result())
    return out


def project_all(p: Problem, lam, gamma, threads=None):
    """Per-block projection results at ``lam``."""
    lam = _check(lam, gamma, p.m)
    xhat = -(p.A.T @ lam + p.c) / gamma
    return _map_blocks(lambda blk, xh: project(blk.spec, xh), p, p.split(xhat), threads)


def eval_dual(p: Problem, lam, gamma, retain_x=False, threads=None) -> DualEvaluation:
    lam = _check(lam, gamma, p.m)
    results = project_all(p, lam, gamma, threads)
    x = np.concatenate([r.x for r in results]) if results else np.zeros(0)
    grad = residual(p, x)
    g = objective(p, x, gamma) + float(lam @ grad)
    return DualEvaluation(lam.copy(), float(gamma), g, grad, corral_stats(results),
                          x if retain_x else None)


def eval_g0(p: Problem, lam, threads=None):
    """``(g_0(lam), xbar)`` with ``xbar`` a vertex minimizer of the Lagrangian."""
    lam = np.asarray(lam, dtype=float)
    s = p.A.T @ lam + p.c
    out = _map_blocks(lambda blk, si: linear_minimize(blk.spec, si)[1], p, p.split(s), threads)
    xbar = np.concatenate(out) if out else np.zeros(0)
    return float(p.c @ xbar + lam @ residual(p, xbar)), xbar


def g0(p: Problem, lam, threads=None) -> float:
    return eval_g0(p, lam, threads)[0]
