import numpy as np
import pytest

from dualproj import (Infeasible, Kind, MarketSpec, dumps_problem, eval_g0, generate_infeasible,
                      generate_marketplace, is_feasible, validate_problem)
from dualproj.diagnostics import relax
from dualproj.reference import reference_lp_solve


def test_same_seed_same_bytes():
    a = dumps_problem(generate_marketplace(I=20, K=5, m=3, seed=42))
    b = dumps_problem(generate_marketplace({"I": 20, "K": 5, "m": 3, "seed": 42}))
    assert a == b
    assert a != dumps_problem(generate_marketplace(I=20, K=5, m=3, seed=43))


def test_density_zero_is_decoupled():
    p = generate_marketplace(I=10, K=4, m=2, density=0.0, seed=1)
    assert p.A.nnz == 0
    x, f, lam = reference_lp_solve(p)
    assert lam == pytest.approx([0.0, 0.0], abs=1e-9)
    assert f == pytest.approx(eval_g0(p, np.zeros(p.m))[0])


@pytest.mark.slow
def test_default_spec_is_feasible():
    ok = 0
    for seed in range(100):
        p = generate_marketplace(I=100, K=10, m=5, seed=seed)
        assert validate_problem(p).ok
        try:
            x, _, _ = reference_lp_solve(p, max_n=p.n)
        except Infeasible:
            continue
        ok += is_feasible(p, x, 1e-7)[0]
    assert ok >= 95


def test_feasible_by_construction():
    # the cheapest vertex of every block fits the budgets
    for seed in range(20):
        p = generate_marketplace(I=30, K=6, m=3, seed=seed)
        assert validate_problem(p).ok
        reference_lp_solve(p)


@pytest.mark.parametrize("poly", ["simplex_eq", "simplex_iq", "boxcut_eq", "boxcut_iq", "box",
                                  "parity"])
def test_polytope_choice(poly):
    p = generate_marketplace(I=5, K=4, m=2, polytope=poly, seed=0)
    assert all(b.spec.kind is Kind(poly) for b in p.blocks)
    assert np.all(p.A.data >= 0) and np.all(p.b >= 0)


def test_diversity_rows_negated():
    p = generate_marketplace(I=12, K=5, m=2, kind="diversity", seed=3)
    assert all(b.spec.kind is Kind.BOXCUT_EQ for b in p.blocks)
    assert np.all(p.A.data <= 0)
    reference_lp_solve(p)


def test_infeasible_and_relaxation():
    for seed in range(5):
        p = generate_infeasible(I=10, K=4, m=3, seed=seed)
        with pytest.raises(Infeasible):
            reference_lp_solve(p)
        q = relax(p)
        assert is_feasible(q, np.zeros(q.n))[0]
        reference_lp_solve(q)


def test_metadata_records_seed():
    p = generate_marketplace(I=3, K=3, m=1, seed=9)
    assert p.metadata["seed"] == 9 and p.metadata["I"] == 3


@pytest.mark.parametrize("kw", [dict(kind="pymk"), dict(I=0), dict(density=1.5),
                                dict(polytope="general")])
def test_bad_spec(kw):
    with pytest.raises(ValueError):
        generate_marketplace(seed=0, **{**dict(I=3, K=3, m=1), **kw})


def test_infeasible_needs_eq():
    with pytest.raises(ValueError):
        generate_infeasible(I=3, K=3, m=1, polytope="simplex_iq", seed=0)
    assert MarketSpec().I == 100
