import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dualproj import box, boxcut, hull, make_problem, parity, simplex

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

KINDS = ("box", "simplex_eq", "simplex_iq", "boxcut_eq", "boxcut_iq", "parity", "general")


def random_spec(rng, kind, K):
    if kind == "box":
        return box()
    if kind in ("simplex_eq", "simplex_iq"):
        return simplex(kind == "simplex_eq")
    if kind in ("boxcut_eq", "boxcut_iq"):
        return boxcut(int(rng.integers(2, K)), kind == "boxcut_eq")
    if kind == "parity":
        return parity()
    return hull(rng.integers(0, 3, size=(int(rng.integers(2, 6)), K)).astype(float))


def random_problem(rng, I=5, K=4, m=2, kinds=KINDS, nonneg=False, slack=0.5):
    """Small mixed-kind problem.  ``K`` is an upper bound per block (>= 3)."""
    cs, As, specs = [], [], []
    for _ in range(I):
        kind = kinds[int(rng.integers(len(kinds)))]
        k = int(rng.integers(3, K + 1)) if K > 3 else 3
        cs.append(rng.standard_normal(k))
        A = rng.uniform(0.0, 1.0, (m, k)) if nonneg else rng.standard_normal((m, k))
        A[rng.random((m, k)) < 0.3] = 0.0
        As.append(A)
        specs.append(random_spec(rng, kind, k))
    b = slack * np.abs(rng.standard_normal(m)) * I / 2
    return make_problem(cs, As, b, specs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def box_toy():
    """One Box block: c=-1, A=[1], b=0.5."""
    return make_problem([[-1.0]], [[[1.0]]], [0.5], [box()])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
