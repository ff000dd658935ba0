import numpy as np
import pytest

from hebbian_kuramoto import (
    Graph,
    complete_graph,
    graph_from_edges,
    incidence_matrix,
    laplacian_from_weights,
    load_graph,
    parse_edge_list,
    parse_graph_spec,
)

from conftest import random_connected_graph


class TestConstruction:
    def test_complete_graph_k3(self):
        g = complete_graph(3)
        assert g.n_vertices == 3
        assert g.edges == ((0, 1), (0, 2), (1, 2))
        assert g.n_edges == 3

    def test_complete_graph_edge_count(self):
        for n in (1, 2, 4, 7):
            g = complete_graph(n)
            assert g.n_edges == n * (n - 1) // 2

    def test_from_edges_normalizes_orientation(self):
        g = graph_from_edges(4, [(2, 0), (3, 1), (1, 0)])
        assert g.edges == ((0, 1), (0, 2), (1, 3))

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            graph_from_edges(3, [(1, 1)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(ValueError):
            graph_from_edges(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range_vertex(self):
        with pytest.raises(ValueError):
            graph_from_edges(3, [(0, 3)])

    def test_degrees(self):
        g = graph_from_edges(4, [(0, 1), (0, 2), (0, 3)])
        assert g.degrees.tolist() == [3, 1, 1, 1]

    def test_connectivity(self):
        assert complete_graph(5).is_connected()
        assert not graph_from_edges(4, [(0, 1), (2, 3)]).is_connected()
        assert Graph(1, ()).is_connected()
        assert not Graph(2, ()).is_connected()


class TestIncidenceAndLaplacian:
    def test_single_edge_incidence(self):
        g = graph_from_edges(2, [(0, 1)])
        b = incidence_matrix(g, np.array([5.0]))
        assert b.tolist() == [[-5.0], [5.0]]

    def test_zero_weights_give_zero_matrices(self):
        g = complete_graph(3)
        w = np.zeros(3)
        assert not incidence_matrix(g, w).any()
        assert not laplacian_from_weights(g, w).any()

    def test_k3_weighted_laplacian_entries(self):
        g = complete_graph(3)
        # edges (0,1), (0,2), (1,2) with weights 1, 2, 3
        lap = laplacian_from_weights(g, np.array([1.0, 2.0, 3.0]))
        expected = np.array([
            [3.0, -1.0, -2.0],
            [-1.0, 4.0, -3.0],
            [-2.0, -3.0, 5.0],
        ])
        np.testing.assert_array_equal(lap, expected)

    def test_incidence_outer_product_identity(self):
        # B(w) B(w)^T equals the Laplacian built from squared weights
        g = complete_graph(3)
        w = np.array([1.0, 2.0, 3.0])
        b = incidence_matrix(g, w)
        lap = laplacian_from_weights(g, w * w)
        np.testing.assert_allclose(b @ b.T, lap, atol=1e-13)

    def test_incidence_outer_product_identity_random(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            g = random_connected_graph(int(rng.integers(2, 9)), 0.4, rng)
            w = rng.normal(size=g.n_edges)
            b = incidence_matrix(g, w)
            lap = laplacian_from_weights(g, w * w)
            np.testing.assert_allclose(b @ b.T, lap, atol=1e-12)

    def test_unweighted_k3_spectrum(self):
        g = complete_graph(3)
        lap = laplacian_from_weights(g, np.ones(3))
        eig = np.linalg.eigvalsh(lap)
        np.testing.assert_allclose(eig, [0.0, 3.0, 3.0], atol=1e-12)

    def test_laplacian_rows_sum_to_zero(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            g = random_connected_graph(6, 0.5, rng)
            lap = laplacian_from_weights(g, rng.normal(size=g.n_edges))
            np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-12)
            np.testing.assert_array_equal(lap, lap.T)

    def test_weight_length_checked(self):
        g = complete_graph(3)
        with pytest.raises(ValueError):
            incidence_matrix(g, np.ones(2))
        with pytest.raises(ValueError):
            laplacian_from_weights(g, np.ones(4))


class TestParsing:
    def test_parse_edge_list(self):
        text = "# triangle\nn 3\n0 1\n\n0 2\n1 2\n"
        g = parse_edge_list(text)
        assert g.edges == ((0, 1), (0, 2), (1, 2))

    def test_parse_requires_header(self):
        with pytest.raises(ValueError):
            parse_edge_list("0 1\n")

    def test_parse_rejects_garbage_line(self):
        with pytest.raises(ValueError):
            parse_edge_list("n 3\n0 1 2\n")

    def test_load_round_trip(self, tmp_path):
        g = complete_graph(4)
        path = tmp_path / "g.txt"
        lines = [f"n {g.n_vertices}"] + [f"{i} {j}" for i, j in g.edges]
        path.write_text("\n".join(lines) + "\n")
        assert load_graph(path).edges == g.edges

    def test_parse_graph_spec_complete(self):
        assert parse_graph_spec("complete:5").edges == complete_graph(5).edges

    def test_parse_graph_spec_path(self, tmp_path):
        path = tmp_path / "pair.txt"
        path.write_text("n 2\n0 1\n")
        assert parse_graph_spec(str(path)).edges == ((0, 1),)

    def test_parse_graph_spec_bad_count(self):
        with pytest.raises(ValueError):
            parse_graph_spec("complete:0")
