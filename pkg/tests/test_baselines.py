import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from photonsolve import (
    CutAssignment,
    GdConfig,
    Graph,
    build_program,
    brute_force_cut,
    brute_force_grid,
    cut_size,
    evaluate,
    local_search_cut,
    project_simplex,
    projected_gradient_descent,
    random_graph,
)
from photonsolve.errors import SearchSpaceError

K3 = Graph(3, ((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)))
C5 = Graph(5, tuple((i, (i + 1) % 5, 1.0) if i < (i + 1) % 5 else ((i + 1) % 5, i, 1.0) for i in range(5)))


class TestProjectSimplex:
    def test_clip_to_vertex(self):
        assert project_simplex([2.0, 0.0, 0.0], 1.0) == pytest.approx([1, 0, 0])

    def test_uniform_shift(self):
        out = project_simplex([0.5, 0.5, 0.5], 1.0)
        assert out == pytest.approx([1 / 3, 1 / 3, 1 / 3])

    def test_idempotent_on_simplex(self):
        v = np.array([0.2, 0.3, 0.5])
        assert project_simplex(v, 1.0) == pytest.approx(v)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            project_simplex([np.nan, 1.0], 1.0)

    @given(
        arrays(np.float64, st.integers(1, 12), elements=st.floats(-50, 50)),
        st.floats(0.1, 20.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_kkt_conditions(self, y, R):
        v = project_simplex(y, R)
        assert abs(v.sum() - R) < 1e-9 * max(1.0, R)
        assert np.all(v >= 0)
        # v_i = max(y_i - tau, 0) for a single threshold tau
        active = v > 0
        taus = y[active] - v[active]
        assert np.ptp(taus) < 1e-9
        if active.any():
            tau = taus.mean()
            assert np.all(y[~active] - tau <= 1e-9)


class TestProjectedGradientDescent:
    def test_local_minimum_trap(self, g_slack):
        v0 = np.array([3.2, 2.8, 94.0])
        r = projected_gradient_descent(g_slack, v0, GdConfig(step_size=0.01))
        assert r.best_v[:2] == pytest.approx([3.0, 3.0], abs=1e-3)
        assert r.best_energy == pytest.approx(4.5, abs=1e-6)

    def test_convex_uniform(self):
        p = build_program([((i, i), 1.0) for i in range(4)], 4, 1.0)
        r = projected_gradient_descent(p, np.array([0.7, 0.1, 0.1, 0.1]))
        assert r.best_v == pytest.approx([0.25] * 4, abs=1e-6)

    def test_zero_program(self):
        p = build_program([((0,), 1.0), ((0,), -1.0)], 2, 1.0)
        v0 = np.array([0.4, 0.6])
        r = projected_gradient_descent(p, v0)
        assert r.best_v == pytest.approx(v0)

    def test_off_simplex_start_rejected(self, g_slack):
        with pytest.raises(ValueError):
            projected_gradient_descent(g_slack, np.array([1.0, 1.0, 1.0]))

    def test_descent_on_convex(self):
        p = build_program(
            [((0, 0), 2.0), ((1, 1), 1.0), ((0, 1), 0.5), ((0,), -1.0)], 2, 1.0
        )
        r = projected_gradient_descent(p, np.array([0.5, 0.5]), GdConfig(step_size=0.05))
        assert np.all(np.diff(r.energy_trace) <= 1e-12)

    def test_deterministic(self, g_slack):
        v0 = np.array([1.0, 4.0, 95.0])
        a = projected_gradient_descent(g_slack, v0)
        b = projected_gradient_descent(g_slack, v0)
        assert a.best_energy == b.best_energy
        assert np.array_equal(a.best_v, b.best_v)


class TestBruteForceGrid:
    def test_g_landscape_small_budget(self, g_program):
        small = build_program(
            [(m.indices, m.coefficient) for m in g_program.terms], 3, 8.0
        )
        v, e = brute_force_grid(small, 0.5)
        assert v == pytest.approx([0.0, 0.0, 8.0])
        assert e == pytest.approx(0.0)

    def test_linear_program(self):
        p = build_program([((0,), 3.0), ((1,), 1.0), ((2,), 2.0)], 3, 1.0)
        v, e = brute_force_grid(p, 0.25)
        assert v == pytest.approx([0.0, 1.0, 0.0])
        assert e == pytest.approx(1.0)

    def test_flat_program(self):
        p = build_program([((0,), 1.0), ((0,), -1.0)], 2, 1.0)
        _, e = brute_force_grid(p, 0.5)
        assert e == 0.0

    def test_guard(self):
        p = build_program([((0,), 1.0)], 30, 100.0)
        with pytest.raises(SearchSpaceError):
            brute_force_grid(p, 0.1)

    def test_lower_bounds_solver_on_grid(self):
        from conftest import random_program

        rng = np.random.default_rng(5)
        p = random_program(rng, num_vars=3, R=2.0)
        _, e = brute_force_grid(p, 0.25)
        from photonsolve.imaginary_time import enumerate_states

        states = enumerate_states(3, 2.0, 0.25)
        assert all(e <= evaluate(p, s) + 1e-12 for s in states)


class TestBruteForceCut:
    def test_triangle_two_colors(self):
        _, value = brute_force_cut(K3, 2)
        assert value == 2.0

    def test_triangle_three_colors(self):
        _, value = brute_force_cut(K3, 3)
        assert value == 3.0

    def test_five_cycle(self):
        _, value = brute_force_cut(C5, 2)
        assert value == 4.0

    def test_assignment_achieves_value(self):
        g = random_graph(8, 0.5, seed=2)
        a, value = brute_force_cut(g, 3)
        assert cut_size(g, a) == value

    def test_relabel_invariance(self):
        g = random_graph(7, 0.5, seed=3)
        perm = np.random.default_rng(0).permutation(7)
        edges = []
        for i, j, w in g.edges:
            a, b = int(perm[i]), int(perm[j])
            edges.append((min(a, b), max(a, b), w))
        relabeled = Graph(7, tuple(sorted(edges)))
        assert brute_force_cut(g, 2)[1] == brute_force_cut(relabeled, 2)[1]

    def test_guard(self):
        g = random_graph(25, 0.5, seed=0)
        with pytest.raises(SearchSpaceError):
            brute_force_cut(g, 4)


class TestLocalSearchCut:
    def test_matches_brute_force_small(self):
        for seed in range(4):
            g = random_graph(10, 0.5, seed=seed)
            for k in (2, 3):
                _, exact = brute_force_cut(g, k)
                _, approx = local_search_cut(g, k, restarts=100, seed=1)
                assert approx == exact

    def test_assignment_consistent(self):
        g = random_graph(12, 0.5, seed=9)
        a, value = local_search_cut(g, 3, restarts=50, seed=2)
        assert cut_size(g, a) == value
