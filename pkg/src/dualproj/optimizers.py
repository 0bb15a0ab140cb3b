"""First-order maximizers of a concave function over ``lam >= 0``.

The objective is supplied as ``fun(lam)`` returning an object with ``g``
(value) and ``grad`` attributes, such as :class:`dualproj.dual.DualEvaluation`
for the LP dual, anything duck-compatible for tests.

Three methods are provided:

``pga``
    projected gradient ascent; the step is found by a weak Wolfe bisection
    along the bent path ``max(lam + eta * d, 0)`` starting from a step
    guessed with a running Lipschitz estimate.
``lbfgsb``
    the same line search along a limited-memory quasi-Newton direction
    restricted to the variables not held at their bound.
``agd``
    Nesterov's accelerated projected gradient with fixed step ``1/L``,
    ``L = sigma_max(A)^2 / gamma``; optionally the step is re-estimated
    from the gradient history.
"""

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InsufficientHistory, InvalidGamma, NoImprovement


@dataclass
class OptimizerConfig:
    method: str = "lbfgsb"
    max_iters: int = 1000
    H: int = 10
    eta_min: float = 1e-6
    eta_max: float = 1.0
    c1: float = 1e-4
    c2: float = 0.9
    memory: int = 10
    tol_grad: Optional[float] = None  # None -> 1e-8 * (1 + |b|)
    improved_agd: bool = False
    max_bisections: int = 50
    power_iters: int = 20
    power_tol: float = 1e-6

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in ("pga", "agd", "lbfgsb"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 < self.c1 < self.c2 < 1:
            raise ValueError("need 0 < c1 < c2 < 1")
        if not 0 < self.eta_min <= self.eta_max:
            raise ValueError("need 0 < eta_min <= eta_max")
        if self.H < 1:
            raise ValueError("history length H must be >= 1")
        if self.memory < 0:
            raise ValueError("memory must be >= 0")


class IterateHistory:
    """Ring buffer of the last ``H`` ``(lam, grad)`` pairs."""

    def __init__(self, H):
        self.buf = deque(maxlen=H)

    def push(self, lam, grad):
        if self.buf and np.array_equal(self.buf[-1][0], lam):
            self.buf[-1] = (lam.copy(), grad.copy())
        else:
            self.buf.append((lam.copy(), grad.copy()))

    def __len__(self):
        return len(self.buf)

    def __iter__(self):
        return iter(self.buf)


def estimate_L(history):
    """Largest gradient difference quotient over consecutive history entries."""
    items = list(history)
    if len(items) < 2:
        raise InsufficientHistory("need at least two history entries")
    L = 0.0
    for (l0, g0), (l1, g1) in zip(items[:-1], items[1:]):
        dl = np.linalg.norm(l1 - l0)
        if dl < 1e-15:
            continue
        L = max(L, np.linalg.norm(g1 - g0) / dl)
    return L


def initial_step(t, cfg, L=None):
    if t <= cfg.H or L is None:
        return cfg.eta_min
    if L <= 0:
        return cfg.eta_max
    return min(1.0 / L, cfg.eta_max)


def weak_wolfe_bisection(phi, eta0, c1=1e-4, c2=0.9, phi0=None, max_iter=50):
    """Step satisfying the weak Wolfe conditions for an ascent along ``phi``.

    ``phi(eta)`` returns ``(value, slope)``.  Accepts ``eta`` with
    ``phi(eta) >= phi(0) + c1 * eta * phi'(0)`` and ``phi'(eta) <= c2 * phi'(0)``;
    the bracket is doubled until the first condition fails and bisected
    afterwards.  After ``max_iter`` trials the best step with sufficient
    increase (or else any increase) is returned.
    """
    f0, d0 = phi(0.0) if phi0 is None else phi0
    if not d0 > 0:
        raise NoImprovement("not an ascent direction")
    lo, hi, eta = 0.0, np.inf, float(eta0)
    best_suff, best_suff_val = None, -np.inf
    best_up, best_up_val = None, f0
    for _ in range(max_iter):
        f, d = phi(eta)
        # strict increase as well: once c1 * eta * d0 is below the rounding
        # unit of f0 the Armijo test alone would accept a flat step forever
        suff = f >= f0 + c1 * eta * d0 and f > f0  # False for nan
        if suff and f > best_suff_val:
            best_suff, best_suff_val = eta, f
        if f > best_up_val:
            best_up, best_up_val = eta, f
        if not suff:
            hi = eta
        elif d > c2 * d0:
            lo = eta
        else:
            return eta
        eta = 2.0 * eta if np.isinf(hi) else 0.5 * (lo + hi)
    if best_suff is not None:
        return best_suff
    if best_up is not None:
        return best_up
    raise NoImprovement(f"no increase found down to step {eta:.3g}")


def pga_step(lam, d, eta):
    return np.maximum(lam + eta * d, 0.0)


def _path_slope_dir(lam, d, eta):
    z = lam + eta * d
    return np.where((z > 0) | ((z == 0) & (d > 0)), d, 0.0)


def projected_grad_norm(lam, grad):
    return float(np.linalg.norm(lam - np.maximum(lam + grad, 0.0)))


@dataclass
class TraceRow:
    iter: int
    g: float
    pg_norm: float
    step: float
    n_evals: int
    wall: float
    mean_dim: float = float("nan")
    vertex_fraction: float = float("nan")


@dataclass
class OptimizerTrace:
    rows: list = field(default_factory=list)
    converged: bool = False
    message: str = ""
    warnings: list = field(default_factory=list)
    n_evals: int = 0
    final: object = None  # evaluation at the returned lam

    @property
    def g(self):
        return np.array([r.g for r in self.rows])

    def record(self, it, ev, pg, step, t0):
        st = getattr(ev, "stats", None)
        self.rows.append(TraceRow(it, float(ev.g), pg, float(step), self.n_evals,
                                  time.perf_counter() - t0,
                                  getattr(st, "mean_dim", float("nan")),
                                  getattr(st, "vertex_fraction", float("nan"))))


class _Counted:
    def __init__(self, fun, trace):
        self.fun, self.trace = fun, trace

    def __call__(self, lam):
        self.trace.n_evals += 1
        return self.fun(lam)


def _path_search(f, lam, d, ev0, eta0, cfg):
    cache = {}

    def phi(eta):
        ev = f(pga_step(lam, d, eta))
        cache[eta] = ev
        return ev.g, float(ev.grad @ _path_slope_dir(lam, d, eta))

    d0 = float(ev0.grad @ _path_slope_dir(lam, d, 0.0))
    eta = weak_wolfe_bisection(phi, eta0, cfg.c1, cfg.c2, (ev0.g, d0), cfg.max_bisections)
    return eta, cache[eta]


def _two_loop(q, pairs):
    """``H q`` for the inverse-Hessian approximation of ``-g`` built from ``pairs``."""
    alphas = []
    q = q.copy()
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    s, y, _ = pairs[-1]
    r = (s @ y) / (y @ y) * q
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        r += (a - rho * (y @ r)) * s
    return r


def maximize(fun, lam0, cfg=None, L=None, tol=None, callback=None):
    """Maximize ``fun`` over the nonnegative orthant starting at ``lam0``.

    ``L`` is the global Lipschitz bound required by ``agd``.
    ``callback(lam, ev, step, pg_norm)`` is called after every step; a
    return value of ``True`` stops the run.
    Returns ``(lam, trace)``.
    """
    cfg = cfg or OptimizerConfig()
    tol = cfg.tol_grad if tol is None else tol
    tol = 1e-8 if tol is None else tol
    trace = OptimizerTrace()
    f = _Counted(fun, trace)
    t0 = time.perf_counter()
    lam = np.maximum(np.asarray(lam0, dtype=float), 0.0)
    if cfg.method == "agd":
        if L is None or not L > 0:
            raise ValueError("agd needs a positive global Lipschitz bound L")
        return _agd(f, lam, cfg, L, tol, trace, t0, callback)

    ev = f(lam)
    hist = IterateHistory(cfg.H)
    hist.push(lam, ev.grad)
    pairs = deque(maxlen=cfg.memory) if cfg.method == "lbfgsb" else None
    trace.record(0, ev, projected_grad_norm(lam, ev.grad), 0.0, t0)
    for t in range(1, cfg.max_iters + 1):
        grad = ev.grad
        if projected_grad_norm(lam, grad) <= tol:
            trace.converged, trace.message = True, "projected gradient below tolerance"
            break
        Lt = estimate_L(hist) if len(hist) >= 2 else None
        d = grad
        eta0 = initial_step(t, cfg, Lt)
        if pairs:
            q = np.where((lam <= 0) & (grad <= 0), 0.0, grad)
            dq = _two_loop(q, list(pairs))
            dq[q == 0] = 0.0
            if dq @ q > 0:
                d, eta0 = dq, 1.0
            else:
                pairs.clear()
        try:
            eta, ev_new = _path_search(f, lam, d, ev, eta0, cfg)
        except NoImprovement as exc:
            if d is not grad:
                pairs.clear()
                try:
                    eta, ev_new = _path_search(f, lam, grad, ev, initial_step(t, cfg, Lt), cfg)
                    d = grad
                except NoImprovement as exc2:
                    exc = exc2
                    eta = None
            else:
                eta = None
            if eta is None:
                trace.converged = True
                trace.message = "line search found no improvement"
                trace.warnings.append(str(exc))
                break
        lam_new = pga_step(lam, d, eta)
        if pairs is not None:
            s = lam_new - lam
            y = grad - ev_new.grad  # gradient change of -g
            sy = s @ y
            if sy > 1e-12:
                pairs.append((s, y, 1.0 / sy))
        lam, ev = lam_new, ev_new
        hist.push(lam, ev.grad)
        pg = projected_grad_norm(lam, ev.grad)
        trace.record(t, ev, pg, eta, t0)
        if callback is not None and callback(lam, ev, eta, pg) is True:
            trace.message = "stopped by callback"
            break
    else:
        trace.message = "iteration limit reached"
    trace.final = ev
    return lam, trace


def _agd(f, lam, cfg, L, tol, trace, t0, callback):
    lam_prev = lam.copy()
    y = lam.copy()
    hist = IterateHistory(cfg.H)
    best = None
    for k in range(1, cfg.max_iters + 1):
        ev = f(y)
        pg = projected_grad_norm(y, ev.grad)
        if best is None or ev.g > best[1].g:
            best = (y.copy(), ev)
        hist.push(y, ev.grad)
        step = 1.0 / L
        if cfg.improved_agd and k > cfg.H and len(hist) >= 2:
            step = initial_step(k, cfg, estimate_L(hist))
        trace.record(k - 1, ev, pg, step, t0)
        if callback is not None and k > 1 and callback(y, ev, step, pg) is True:
            trace.message = "stopped by callback"
            break
        if pg <= tol:
            trace.converged, trace.message = True, "projected gradient below tolerance"
            break
        lam_new = pga_step(y, ev.grad, step)
        y = lam_new + (k - 1.0) / (k + 2.0) * (lam_new - lam_prev)
        y = np.maximum(y, 0.0)
        lam_prev = lam_new
    else:
        trace.message = "iteration limit reached"
    trace.final = best[1]
    return best[0], trace


def power_iteration_sq_norm(A, iters=20, tol=1e-6):
    """Estimate ``sigma_max(A)^2`` by power iteration on ``A^T A``."""
    n = A.shape[1]
    if n == 0:
        return 0.0
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = w / new
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return est


def maximize_dual(p, gamma, lam0=None, cfg=None, threads=None, callback=None):
    """Maximize ``g_gamma`` over ``lam >= 0``; returns ``(lam, trace)``."""
    from .dual import eval_dual

    if not gamma > 0:
        raise InvalidGamma(f"gamma must be positive, got {gamma}")
    cfg = cfg or OptimizerConfig()
    lam0 = np.zeros(p.m) if lam0 is None else lam0
    tol = cfg.tol_grad if cfg.tol_grad is not None else 1e-8 * (1.0 + np.linalg.norm(p.b))
    L = None
    if cfg.method == "agd":
        L = power_iteration_sq_norm(p.A, cfg.power_iters, cfg.power_tol) / gamma
        if L == 0.0:
            L = 1.0 / cfg.eta_max
    return maximize(lambda lam: eval_dual(p, lam, gamma, threads=threads), lam0, cfg, L, tol,
                    callback)
