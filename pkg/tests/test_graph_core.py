import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphlap import (
    GraphData,
    GraphValidationError,
    WeightedGraph,
    validate,
)
from graphlap.verify import random_graph


def path3():
    return WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)])


class TestValidate:
    def test_clean_two_vertex(self):
        data = GraphData(["0", "1"], np.zeros(2), np.ones(2), [(0, 1, 1.0)])
        assert validate(data) == []

    def test_symmetry_violation(self):
        data = GraphData(["0", "1"], np.zeros(2), np.ones(2), [(0, 1, 1.0), (1, 0, 2.0)])
        kinds = [v.kind for v in validate(data)]
        assert "SymmetryViolation" in kinds

    def test_measure_violation(self):
        data = GraphData(["0"], np.zeros(1), np.zeros(1), [])
        kinds = [v.kind for v in validate(data)]
        assert "MeasureViolation" in kinds

    def test_self_loop_and_negative(self):
        data = GraphData(["0", "1"], np.zeros(2), np.ones(2), [(0, 0, 1.0), (0, 1, -1.0)])
        kinds = {v.kind for v in validate(data)}
        assert kinds == {"SelfLoop", "NegativeWeight"}

    def test_duplicate_edge(self):
        data = GraphData(["0", "1"], np.zeros(2), np.ones(2), [(0, 1, 1.0), (0, 1, 1.0)])
        kinds = [v.kind for v in validate(data)]
        assert "DuplicateEdge" in kinds

    def test_build_rejects_invalid(self):
        data = GraphData(["0"], np.array([-1.0]), np.ones(1), [])
        with pytest.raises(GraphValidationError):
            WeightedGraph.build(data)


class TestDegrees:
    def test_path_center(self):
        n, d = path3().weighted_degree(1)
        assert n == 2 and d == 2

    def test_isolated_with_killing(self):
        g = WeightedGraph(1, [], c=[2.0], m=[1.0])
        assert g.weighted_degree(0) == (2.0, 2.0)

    def test_measure_scaling(self):
        g = WeightedGraph(2, [(0, 1, 1.0)], m=[4.0, 1.0])
        assert g.weighted_degree(0) == (1.0, 0.25)


class TestFoldKilling:
    def test_no_killing_inert_vertex(self):
        g = path3().fold_killing()
        assert g.n == 4
        assert g.weighted_degree(3)[0] == 0.0

    def test_killing_becomes_edge(self):
        g = WeightedGraph(1, [], c=[2.0]).fold_killing()
        assert g.b(0, 1) == 2.0
        assert np.all(g.c == 0)

    def test_form_preserved(self):
        rng = np.random.default_rng(0)
        g = random_graph(rng)
        gf = g.fold_killing()
        u = rng.normal(size=g.n)
        uf = np.append(u, 0.0)
        assert abs(g.quadratic_form(u) - gf.quadratic_form(uf)) < 1e-12 * max(
            1.0, g.quadratic_form(u)
        )


class TestComponents:
    def test_path_connected(self):
        assert path3().connected_components() == [[0, 1, 2]]

    def test_two_edges(self):
        g = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        assert g.connected_components() == [[0, 1], [2, 3]]

    def test_zero_weight_is_no_edge(self):
        g = WeightedGraph(2, [(0, 1, 0.0)])
        assert len(g.connected_components()) == 2


class TestOperator:
    def test_two_vertex(self):
        g = WeightedGraph(2, [(0, 1, 1.0)])
        assert np.allclose(g.apply_formal_laplacian([1.0, 0.0]), [1.0, -1.0])

    def test_constant_in_kernel(self):
        g = path3()
        assert np.allclose(g.apply_formal_laplacian(np.ones(3)), 0.0)

    def test_killing_only(self):
        g = WeightedGraph(1, [], c=[2.0])
        assert np.allclose(g.apply_formal_laplacian([3.0]), [6.0])


class TestForm:
    def test_two_vertex(self):
        g = WeightedGraph(2, [(0, 1, 1.0)])
        assert g.quadratic_form([1.0, 0.0]) == 1.0

    def test_indicator_equals_boundary(self):
        from graphlap import ExplicitFamily, boundary_measure

        rng = np.random.default_rng(1)
        for _ in range(20):
            g = random_graph(rng)
            fam = ExplicitFamily(g)
            k = rng.integers(1, g.n + 1)
            W = sorted(rng.choice(g.n, size=k, replace=False).tolist())
            u = np.zeros(g.n)
            u[W] = 1.0
            assert abs(g.quadratic_form(u) - boundary_measure(fam, W)) < 1e-10

    def test_form_vs_operator(self):
        rng = np.random.default_rng(2)
        g = random_graph(rng)
        u = rng.normal(size=g.n)
        q = g.quadratic_form(u)
        assert abs(q - g.inner_m(g.apply_formal_laplacian(u), u)) < 1e-12 * max(1.0, abs(q))


@st.composite
def graphs_and_vectors(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if draw(st.booleans()):
                edges.append((u, v, draw(st.floats(min_value=1e-3, max_value=2.0))))
    c = [draw(st.floats(min_value=0.0, max_value=1.0)) for _ in range(n)]
    m = [draw(st.floats(min_value=0.1, max_value=2.0)) for _ in range(n)]
    u = [draw(st.floats(min_value=-3.0, max_value=3.0)) for _ in range(n)]
    v = [draw(st.floats(min_value=-3.0, max_value=3.0)) for _ in range(n)]
    return WeightedGraph(n, edges, c, m), np.array(u), np.array(v)


@settings(max_examples=40, deadline=None)
@given(graphs_and_vectors())
def test_form_properties(gv):
    g, u, v = gv
    q = g.quadratic_form(u)
    assert q >= 0
    # symmetry of the polarized form
    assert abs(g.quadratic_form_pair(u, v) - g.quadratic_form_pair(v, u)) < 1e-9
    # operator consistency
    assert abs(q - g.inner_m(g.apply_formal_laplacian(u), u)) < 1e-9 * max(1.0, abs(q))
    # normal contractions do not increase the form
    assert g.quadratic_form(np.clip(u, 0.0, 1.0)) <= q + 1e-9
    assert g.quadratic_form(np.abs(u)) <= q + 1e-9


def test_zero_form_iff_componentwise_constant():
    g = WeightedGraph(4, [(0, 1, 1.0), (2, 3, 1.0)])
    u = np.array([2.0, 2.0, -1.0, -1.0])
    assert g.quadratic_form(u) == 0.0
    assert g.quadratic_form([1.0, 0.0, 0.0, 0.0]) > 0


def test_json_roundtrip():
    rng = np.random.default_rng(3)
    g = random_graph(rng)
    g2 = WeightedGraph.from_json(g.to_json())
    assert g2.edges == g.edges
    assert np.allclose(g2.c, g.c) and np.allclose(g2.m, g.m)
