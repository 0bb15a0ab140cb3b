import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dualproj import (Block, DimensionError, Kind, PolytopeSpec, Problem, box, boxcut, hull,
                      is_feasible, make_problem, objective, residual, simplex, validate_problem)
from dualproj.dual import eval_dual

from conftest import random_problem


def two_block():
    return make_problem([[1.0, 2.0], [0.0, -1.0]], [[[1.0, 0.0]], [[0.0, 2.0]]], [1.0],
                        [simplex(), box()])


class TestValidation:
    def test_well_formed(self):
        assert validate_problem(two_block()).ok

    def test_delta_equal_to_K(self):
        p = make_problem([[0, 0, 0]], [np.zeros((1, 3))], [1.0], [boxcut(3)])
        rep = validate_problem(p)
        assert not rep.ok
        assert rep.violations[0][0] == 0
        assert "delta out of range" in rep.violations[0][1]

    def test_column_mismatch(self):
        blk = Block(0, np.zeros(2), sp.csc_matrix(np.ones((1, 3))), box())
        rep = validate_problem(Problem([blk], [1.0]))
        assert any("dimension mismatch" in r for _, r in rep.violations)

    def test_empty_problem(self):
        rep = validate_problem(Problem([], [1.0]))
        assert any("I=0" in r for _, r in rep.violations)

    def test_collects_everything(self):
        blocks = [Block(0, [np.nan, 0.0], np.ones((1, 2)), box()),
                  Block(5, [0.0, 0.0, 0.0], np.ones((2, 3)), hull(np.ones((2, 4))))]
        rep = validate_problem(Problem(blocks, [np.inf]))
        reasons = " | ".join(r for _, r in rep.violations)
        for needle in ("non-finite", "contiguous", "rows", "vertex dimension"):
            assert needle in reasons

    def test_general_needs_vertices(self):
        assert PolytopeSpec(Kind.GENERAL).violations(2)


class TestResidualObjective:
    def test_scalar(self, box_toy):
        assert residual(box_toy, [1.0]) == pytest.approx([0.5])

    def test_zero_point(self, rng):
        p = random_problem(rng)
        assert np.array_equal(residual(p, np.zeros(p.n)), -p.b)

    def test_two_blocks(self):
        p = make_problem([[0, 0], [0, 0]], [[[1, 0], [0, 0]], [[0, 0], [0, 2]]], [1, 1],
                         [box(), box()])
        r = residual(p, [1, 0, 0, 0.5])
        assert np.array_equal(r, [0.0, 0.0])
        dense = p.A.toarray() @ np.array([1, 0, 0, 0.5]) - p.b
        assert np.array_equal(r, dense)

    def test_wrong_length(self, box_toy):
        with pytest.raises(DimensionError):
            residual(box_toy, [1.0, 2.0])

    def test_objective_examples(self):
        p1 = make_problem([[-1.0]], [[[0.0]]], [0.0], [box()])
        assert objective(p1, [1.0], 1.0) == -0.5
        p2 = make_problem([[1.0, 2.0]], [[[0.0, 0.0]]], [0.0], [box()])
        assert objective(p2, [0.5, 0.5], 0.2) == pytest.approx(1.55)
        assert objective(p2, [0.0, 0.0], 3.0) == 0.0

    def test_negative_gamma(self, box_toy):
        with pytest.raises(ValueError):
            objective(box_toy, [0.0], -1.0)

    @given(arrays(float, 6, elements=st.floats(-3, 3)), st.floats(0, 10))
    def test_smoothing_term_is_additive(self, x, gamma):
        p = make_problem([np.arange(6.0)], [np.ones((1, 6))], [1.0], [box()])
        lhs = objective(p, x, 0.0) + 0.5 * gamma * (x @ x)
        assert objective(p, x, gamma) == pytest.approx(lhs, rel=1e-12, abs=1e-12)


class TestFeasibility:
    def test_simplex_vertex(self):
        p = make_problem([[0.0, 0.0]], [[[1.0, 1.0]]], [1.0], [simplex()])
        ok, v = is_feasible(p, [1.0, 0.0])
        assert ok and v == 0.0

    def test_sum_violated(self):
        p = make_problem([[0.0, 0.0]], [[[0.0, 0.0]]], [1.0], [simplex()])
        assert not is_feasible(p, [0.6, 0.6])[0]

    def test_boxcut_vertex(self):
        p = make_problem([np.zeros(3)], [[[1.0, 1.0, 1.0]]], [2.0], [boxcut(2)])
        assert is_feasible(p, [1.0, 1.0, 0.0])[0]

    def test_budget_violation_reported(self, box_toy):
        ok, v = is_feasible(box_toy, [1.0])
        assert not ok and v == pytest.approx(0.5)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_monotone_in_tol(self, t1, extra):
        p = make_problem([[0.0, 0.0]], [[[1.0, 1.0]]], [1.0], [simplex()])
        x = [0.5 + t1 / 3, 0.5]
        if is_feasible(p, x, t1)[0]:
            assert is_feasible(p, x, t1 + extra)[0]


def test_parallel_residual_matches_serial(rng):
    p = random_problem(rng, I=40, K=5, m=3)
    lam = np.abs(rng.standard_normal(p.m))
    e1 = eval_dual(p, lam, 0.3, retain_x=True, threads=1)
    e8 = eval_dual(p, lam, 0.3, retain_x=True, threads=8)
    assert np.array_equal(e1.grad, e8.grad)
    assert np.array_equal(e1.grad, residual(p, e1.x))


def test_blocks_are_immutable(box_toy):
    with pytest.raises(ValueError):
        box_toy.blocks[0].c[0] = 3.0
    with pytest.raises(ValueError):
        box_toy.b[0] = 3.0


def test_triplets_sorted_by_column():
    A = np.array([[0.0, 2.0, 1.0], [3.0, 0.0, 4.0]])
    rows, cols, vals = Block(0, np.zeros(3), A, box()).triplets()
    assert list(zip(cols, rows)) == sorted(zip(cols, rows))
    assert np.array_equal(vals, [3.0, 2.0, 1.0, 4.0])
