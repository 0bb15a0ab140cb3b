import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualproj import (DegenerateCorral, MaxIterationsExceeded, VertexListOracle, affine_minimizer,
                      boxcut, minor_cycle_step, optimality_check, project_boxcut_eq,
                      project_simplex_eq, simplex, wolfe_project)
from dualproj.reference import reference_qp_project
from dualproj.wolfe import WolfeState


def simplex_oracle(K):
    return VertexListOracle(np.eye(K))


class TestOptimalityCheck:
    def test_zero_distance(self):
        ok, v = optimality_check(np.array([0.3, 0.7]), np.array([0.3, 0.7]), simplex_oracle(2))
        assert ok and v is None

    def test_vertex_is_optimal(self):
        ok, _ = optimality_check(np.array([1.0, 0.0]), np.array([5.0, 1.0]), simplex_oracle(2))
        assert ok

    def test_returns_violating_vertex(self):
        ok, v = optimality_check(np.array([1.0, 0.0]), np.array([0.9, 0.4]), simplex_oracle(2))
        assert not ok and v == 1


class TestAffineMinimizer:
    def test_single_point(self):
        y, a = affine_minimizer(np.array([[1.0, 2.0]]), np.array([7.0, -1.0]))
        assert np.array_equal(y, [1.0, 2.0]) and np.array_equal(a, [1.0])

    def test_segment(self):
        y, a = affine_minimizer(np.eye(2), np.array([0.9, 0.4]))
        assert y == pytest.approx([0.75, 0.25]) and a == pytest.approx([0.75, 0.25])

    def test_boxcut_pair(self):
        V = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
        y, a = affine_minimizer(V, np.array([1.0, 0.6, 0.4]))
        assert a == pytest.approx([0.6, 0.4]) and y == pytest.approx([1.0, 0.6, 0.4])

    def test_coefficients_sum_to_one(self, rng):
        for _ in range(20):
            V = rng.standard_normal((3, 5))
            y, a = affine_minimizer(V, rng.standard_normal(5))
            assert a.sum() == pytest.approx(1.0)
            assert y == pytest.approx(a @ V)

    def test_collinear_points_fall_back(self):
        # the bordered system is singular; the ridge solve still finds the line's closest point
        V = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        y, a = affine_minimizer(V, np.array([0.0, 1.0]))
        assert y == pytest.approx([0.5, 0.5]) and a.sum() == pytest.approx(1.0)

    def test_degenerate(self):
        V = np.array([[0.0, 0.0], [1.0, np.nan]])
        with pytest.raises(DegenerateCorral):
            affine_minimizer(V, np.array([0.0, 1.0]))


class TestMinorCycle:
    def _state(self, rho, V):
        rho = np.asarray(rho, float)
        return WolfeState(list(range(len(rho))), np.asarray(V, float), rho, rho @ np.asarray(V, float))

    def test_two_weights(self):
        # theta = 0.5 / 0.7; the second weight is driven to zero and removed
        V = np.eye(2)
        st_ = self._state([0.5, 0.5], V)
        alpha = np.array([1.2, -0.2])
        y = alpha @ V
        minor_cycle_step(st_, y, alpha)
        assert st_.ids == [0]
        assert st_.rho == pytest.approx([1.0])
        assert st_.x == pytest.approx([1.0, 0.0])

    def test_three_weights(self):
        V = np.eye(3)
        st_ = self._state([0.2, 0.3, 0.5], V)
        alpha = np.array([-0.1, 0.6, 0.5])
        minor_cycle_step(st_, alpha @ V, alpha)
        assert st_.ids == [1, 2]
        # theta = 2/3: rho = 2/3 alpha + 1/3 rho = (0, 0.5, 0.5)
        assert st_.rho == pytest.approx([0.5, 0.5])
        assert st_.minor == 1


class TestWolfeProject:
    def test_vertex_first(self):
        res = wolfe_project(simplex_oracle(3), np.array([5.0, 1.0, 0.0]))
        assert np.array_equal(res.x, [1.0, 0.0, 0.0])
        assert res.stats["major"] == 0 and res.corral_dim == 0

    def test_general_hull_edge(self):
        V = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
        res = wolfe_project(VertexListOracle(V), np.array([3.0, 3.0]))
        assert res.x == pytest.approx([1.0, 1.0], abs=1e-12)
        assert sorted(res.support) == [1, 2] and res.corral_dim == 1

    def test_interior_point(self):
        V = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])
        xhat = np.array([0.5, 0.4])
        res = wolfe_project(VertexListOracle(V), xhat)
        assert np.linalg.norm(res.x - xhat) < 1e-10

    def test_budget(self):
        with pytest.raises(MaxIterationsExceeded) as exc:
            wolfe_project(simplex_oracle(6), np.full(6, 0.2), max_major=1)
        assert exc.value.best is not None

    @given(st.integers(0, 2**32 - 1))
    def test_support_reconstructs(self, seed):
        rng = np.random.default_rng(seed)
        V = rng.standard_normal((int(rng.integers(2, 8)), 4))
        res = wolfe_project(VertexListOracle(V), 2 * rng.standard_normal(4))
        assert np.all(res.weights > 0)
        assert res.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(res.weights @ V[res.support], res.x, atol=1e-10)

    def test_descent_is_strict(self, rng, monkeypatch):
        from dualproj import wolfe as w

        real = w.optimality_check
        seen = []

        def spy(x, xhat, oracle, eps=w.EPS_OPT):
            seen.append(float((x - xhat) @ (x - xhat)))
            return real(x, xhat, oracle, eps)

        monkeypatch.setattr(w, "optimality_check", spy)
        for _ in range(30):
            seen.clear()
            V = rng.integers(0, 2, (8, 5)).astype(float)
            w.wolfe_project(VertexListOracle(V), rng.standard_normal(5))
            assert all(b < a + 1e-12 for a, b in zip(seen, seen[1:]))


def test_matches_specialized_kernels(rng):
    V_s = np.eye(5)
    for _ in range(100):
        xhat = rng.standard_normal(5)
        a = wolfe_project(VertexListOracle(V_s), xhat).x
        assert np.linalg.norm(a - project_simplex_eq(xhat).x) < 1e-8
    _, V_b = boxcut(3).enumerate_vertices(6)
    for _ in range(100):
        xhat = rng.standard_normal(6) + 0.5
        a = wolfe_project(VertexListOracle(V_b), xhat).x
        assert np.linalg.norm(a - project_boxcut_eq(xhat, 3).x) < 1e-8
        assert np.linalg.norm(a - reference_qp_project(boxcut(3), xhat)) < 1e-8


def test_vertex_short_circuit_skips_affine_solves(rng, monkeypatch):
    from dualproj import wolfe as w

    calls = []
    real = w.affine_minimizer
    monkeypatch.setattr(w, "affine_minimizer", lambda V, x: calls.append(1) or real(V, x))
    for _ in range(50):
        xhat = 10 * rng.standard_normal(4)
        ref = reference_qp_project(simplex(), xhat)
        calls.clear()
        w.wolfe_project(VertexListOracle(np.eye(4)), xhat)
        if np.isclose(ref.max(), 1.0):
            assert not calls
