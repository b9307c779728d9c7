import numpy as np
import pytest

from graphlap import (
    DirichletSection,
    ExplicitFamily,
    GraphError,
    Law,
    RayFamily,
    TreeFamily,
    WeightedGraph,
    ball_exhaustion,
    condition_A_diagnostic,
    section,
)
from graphlap.verify import random_graph


def path3_family():
    return ExplicitFamily(WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)]))


class TestSection:
    def test_ray_section(self):
        ray = RayFamily(Law("const", value=1.0))
        s = section(ray, [0, 1, 2])
        assert np.allclose(s.matrix(), [[1, -1, 0], [-1, 2, -1], [0, -1, 2]])
        assert np.allclose(s.g, [0, 0, 1])

    def test_path_subsection(self):
        s = section(path3_family(), [0, 1])
        assert np.allclose(s.matrix(), [[1, -1], [-1, 2]])
        assert np.allclose(s.g, [0, 1])

    def test_full_section_no_boundary(self):
        s = section(path3_family(), [0, 1, 2])
        assert np.allclose(s.g, 0.0)

    def test_symmetrized_psd(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            g = random_graph(rng)
            fam = ExplicitFamily(g)
            k = int(rng.integers(1, g.n + 1))
            U = sorted(rng.choice(g.n, size=k, replace=False).tolist())
            s = DirichletSection(fam, U)
            H = s.symmetrized()
            assert np.allclose(H, H.T)
            assert np.linalg.eigvalsh(H).min() > -1e-10
            assert np.all(s.g >= 0)

    def test_vertex_outside_universe(self):
        with pytest.raises(GraphError):
            section(path3_family(), [0, 7])


class TestBallExhaustion:
    def test_ray(self):
        ray = RayFamily(Law("const", value=1.0))
        ex = ball_exhaustion(ray, 0, [1, 2, 3])
        assert ex.sets == [[0, 1], [0, 1, 2], [0, 1, 2, 3]]

    def test_saturation(self):
        ex = ball_exhaustion(path3_family(), 1, [1, 5])
        assert ex.sets == [[1, 0, 2], [1, 0, 2]]

    def test_tree_ball(self):
        tree = TreeFamily([2])
        assert len(tree.ball(0, 2)) == 7

    def test_radii_must_increase(self):
        with pytest.raises(GraphError):
            ball_exhaustion(path3_family(), 0, [2, 2])


class TestResolvent:
    def test_scalar(self):
        s = section(path3_family(), [1])
        assert np.allclose(s.resolvent_apply(1.0, [1.0]), [1 / 3])

    def test_full_path(self):
        s = section(path3_family(), [0, 1, 2])
        u = s.resolvent_apply(1.0, [0.0, 1.0, 0.0])
        assert abs(u[1] - 0.5) < 1e-12

    def test_domain_monotonicity_example(self):
        s1 = section(path3_family(), [1])
        s2 = section(path3_family(), [0, 1, 2])
        u1 = s1.resolvent_apply(1.0, [1.0])[0]
        u2 = s2.resolvent_apply(1.0, [0.0, 1.0, 0.0])[1]
        assert u1 <= u2 + 1e-12

    def test_positivity(self):
        rng = np.random.default_rng(1)
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        s = section(fam, list(range(g.n)))
        f = rng.uniform(0.0, 1.0, g.n)
        assert np.all(s.resolvent_apply(0.7, f) >= -1e-12)


class TestSemigroup:
    def test_identity_at_zero(self):
        s = section(path3_family(), [0, 1, 2])
        f = np.array([0.3, -1.0, 2.0])
        assert np.array_equal(s.semigroup_apply(0.0, f), f)

    def test_two_vertex_closed_form(self):
        fam = ExplicitFamily(WeightedGraph(2, [(0, 1, 1.0)]))
        s = section(fam, [0, 1])
        out = s.semigroup_apply(0.5, [1.0, 0.0])
        assert np.allclose(out, [0.5 * (1 + np.exp(-1)), 0.5 * (1 - np.exp(-1))])

    def test_conserves_ones_without_killing(self):
        g = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0)])
        s = section(ExplicitFamily(g), [0, 1, 2, 3])
        assert np.allclose(s.semigroup_apply(1.3, np.ones(4)), 1.0)

    def test_markov_contraction(self):
        rng = np.random.default_rng(2)
        g = random_graph(rng)
        s = section(ExplicitFamily(g), list(range(g.n)))
        f = rng.uniform(0.0, 1.0, g.n)
        out = s.semigroup_apply(0.8, f)
        assert np.all(out >= -1e-12) and np.all(out <= f.max() + 1e-12)


class TestInvariants:
    def test_resolvent_identity(self):
        rng = np.random.default_rng(3)
        ray = RayFamily(Law("poly", power=2.0), killing_law=Law("const", value=0.3))
        s = section(ray, list(range(12)))
        alpha = 1.7
        lhs = alpha * s.resolvent_apply(alpha, s.ones()) + s.resolvent_apply(alpha, s.g + s.cm)
        assert np.max(np.abs(lhs - 1.0)) < 1e-10
        del rng

    def test_resolvent_convergence_along_exhaustion(self):
        ray = RayFamily(Law("const", value=1.0))
        ex = ball_exhaustion(ray, 0, [4, 8, 16])
        prev = None
        for i in range(3):
            s = ex.section(i)
            f = np.zeros(s.size)
            f[:5] = 1.0
            u = s.resolvent_apply(1.0, f)[:5]
            if prev is not None:
                assert np.all(u >= prev - 1e-12)
            prev = u

    def test_semigroup_property(self):
        s = section(path3_family(), [0, 1, 2])
        f = np.array([1.0, -0.5, 0.2])
        lhs = s.semigroup_apply(0.9, f)
        rhs = s.semigroup_apply(0.4, s.semigroup_apply(0.5, f))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


class TestConditionA:
    def test_uniform_measure(self):
        assert condition_A_diagnostic(RayFamily(Law("const", value=1.0)))["verdict"] == (
            "SATISFIED-BY-BOUND"
        )

    def test_explicit_finite(self):
        assert condition_A_diagnostic(path3_family())["verdict"] == "SATISFIED-BY-BOUND"

    def test_summable_measure_unknown(self):
        fam = RayFamily(Law("const", value=1.0), measure_law=Law("geom", ratio=0.5))
        assert condition_A_diagnostic(fam)["verdict"] == "UNKNOWN"

    def test_growing_measure_satisfied(self):
        fam = RayFamily(Law("const", value=1.0), measure_law=Law("poly", power=1.0, scale=0.5))
        out = condition_A_diagnostic(fam)
        assert out["verdict"] in ("SATISFIED", "SATISFIED-BY-BOUND")


class TestTreeFamily:
    def test_generation_sizes(self):
        tree = TreeFamily([2, 3])
        assert [tree.generation(x) for x in [0, 1, 2, 3, 8, 9]] == [0, 1, 1, 2, 2, 3]

    def test_neighbors_symmetric(self):
        tree = TreeFamily([2, 3], weight_law=Law("poly", power=1.0))
        for x in range(20):
            for y, b in tree.neighbors(x):
                back = dict(tree.neighbors(y))
                assert back[x] == b

    def test_degree_closed_form(self):
        tree = TreeFamily([3], killing_law=Law("const", value=0.5))
        for x in [0, 1, 5, 14]:
            assert abs(tree.n(x) - (sum(b for _, b in tree.neighbors(x)) + tree.c(x))) < 1e-12
