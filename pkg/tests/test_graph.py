from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import realization_closed_form
from structinfo.graph import (GraphError, JointDistribution, WeightedGraph, bipartite_from_joint,
                              degree_realization, read_edge_list, read_joint, value_graph,
                              write_edge_list)

FIXTURES = Path(__file__).parent / "fixtures"


def simplex(min_size=1, max_size=16):
    return st.lists(st.floats(0.01, 1.0), min_size=min_size, max_size=max_size).map(
        lambda xs: np.asarray(xs) / np.sum(xs))


def joints(max_n=6):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        m = draw(st.integers(1, max_n))
        cells = draw(st.lists(st.floats(0.01, 1.0), min_size=n * m, max_size=n * m))
        t = np.asarray(cells).reshape(n, m)
        return JointDistribution(t / t.sum())
    return build()


class TestWeightedGraph:
    def test_loop_counts_once_toward_degree(self):
        g = WeightedGraph.from_edges(2, [(0, 1, 0.3), (1, 1, 0.4)])
        assert np.allclose(g.degrees, [0.3, 0.7])
        assert g.volume == pytest.approx(1.0)

    def test_loop_free_volume_is_twice_edge_weight(self):
        g = WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 2.5)])
        assert g.volume == pytest.approx(7.0)

    @pytest.mark.parametrize("edges", [[(0, 1, -1.0)], [(0, 1, 1.0), (1, 0, 2.0)], [(0, 5, 1.0)]])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(GraphError):
            WeightedGraph.from_edges(3, edges)

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(GraphError):
            WeightedGraph(np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_edge_list_round_trip(self, tmp_path):
        g = WeightedGraph.from_edges(4, [(0, 1, 0.5), (2, 2, 0.25), (1, 3, 1.5)])
        path = tmp_path / "g.txt"
        write_edge_list(g, path)
        assert np.array_equal(read_edge_list(path).weights, g.weights)

    def test_connectivity(self):
        assert not WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).is_connected()
        assert WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).is_connected()


class TestJointDistribution:
    def test_marginals(self):
        j = JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert np.allclose(j.px, [0.3, 0.7])
        assert np.allclose(j.py, [0.4, 0.6])

    @pytest.mark.parametrize("table", [np.diag([0.5, 0.5]), np.array([[0.5, 0.6]]), np.array([[0.5, -0.1, 0.6]])])
    def test_rejects_invalid_tables(self, table):
        with pytest.raises(GraphError):
            JointDistribution(table)

    def test_reads_matrix_fixture(self):
        j = read_joint(FIXTURES / "uniform2.txt")
        assert np.allclose(j.table, 0.25)


class TestBipartite:
    def test_uniform_is_complete_bipartite(self):
        g = bipartite_from_joint(JointDistribution(np.full((2, 2), 0.25)))
        assert [w for *_, w in g.edges()] == [0.25] * 4
        assert g.volume == pytest.approx(2.0)
        assert g.weights[0, 1] == 0 and g.weights[2, 3] == 0

    def test_degrees_are_marginals(self):
        g = bipartite_from_joint(JointDistribution(np.array([[0.1, 0.2], [0.3, 0.4]])))
        assert np.allclose(g.degrees[:2], [0.3, 0.7])
        assert g.volume == pytest.approx(2.0)

    @given(joints())
    def test_each_side_sums_to_one(self, j):
        g = bipartite_from_joint(j)
        n = j.shape[0]
        assert abs(g.degrees[:n].sum() - 1) < 1e-12
        assert abs(g.degrees[n:].sum() - 1) < 1e-12


class TestValueGraph:
    def test_single_edge(self):
        g = value_graph([0.2, 0.5])
        assert g.weights[0, 1] == pytest.approx(0.3)

    def test_equal_values_give_zero_triangle(self):
        assert value_graph([0.4, 0.4, 0.4]).volume == 0.0

    def test_pairwise_differences(self):
        w = value_graph([0.0, 1.0, 0.5]).weights
        assert (w[0, 1], w[0, 2], w[1, 2]) == (1.0, 0.5, 0.5)

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=12, unique=True))
    def test_complete_graph_edge_count(self, values):
        n = len(values)
        assert len(value_graph(values).edges()) == n * (n - 1) // 2

    def test_needs_two_values(self):
        with pytest.raises(GraphError):
            value_graph([0.5])


class TestDegreeRealization:
    def test_equal_pair(self):
        g = degree_realization([0.5, 0.5])
        assert g.weights[0, 1] == 0.5
        assert len(g.edges()) == 1

    def test_unequal_pair_puts_loop_on_heavier_vertex(self):
        g = degree_realization([0.3, 0.7])
        assert g.weights[0, 1] == pytest.approx(0.3)
        assert g.weights[1, 1] == pytest.approx(0.4)
        assert g.weights[0, 0] == 0
        assert np.allclose(g.degrees, [0.3, 0.7], atol=1e-15)

    def test_heavier_first_vertex(self):
        g = degree_realization([0.7, 0.3])
        assert g.weights[0, 0] == pytest.approx(0.4)

    def test_single_vertex(self):
        assert degree_realization([1.0]).degrees[0] == 1.0

    @given(simplex())
    def test_matches_unrolled_construction(self, p):
        g = degree_realization(p)
        assert np.abs(g.weights - realization_closed_form(p)).max() < 1e-14

    @given(simplex(min_size=5, max_size=5))
    def test_degrees_and_connectivity(self, p):
        g = degree_realization(p)
        assert np.abs(g.degrees - p).max() < 1e-12
        assert g.is_connected()

    @pytest.mark.parametrize("p", [[0.5, 0.6], [0.0, 1.0], [-0.1, 1.1], []])
    def test_rejects_non_distributions(self, p):
        with pytest.raises(GraphError):
            degree_realization(p)
