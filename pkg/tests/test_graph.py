import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from structack.graph import (EdgeSet, Graph, GraphFormatError, add_edges, connected_components,
                             degree_sequence, extract_lcc, load_edge_list, load_linqs, load_npz,
                             local_clustering_coefficients, remove_edges, save_edge_list)
from structack.generators import complete_graph, cycle_graph, gnp_graph, path_graph, star_graph


def test_from_edges_collapses_duplicates():
    g = Graph.from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 1)])
    assert g.n == 4 and g.m == 2
    assert g.degrees.tolist() == [1, 2, 1, 0]
    assert g.edges().tolist() == [[0, 1], [1, 2]]


def test_graph_rejects_bad_adjacency():
    with pytest.raises(ValueError):
        Graph(sp.csr_matrix(np.array([[0, 1], [0, 0]])))
    with pytest.raises(ValueError):
        Graph(sp.csr_matrix(np.array([[1, 0], [0, 0]])))
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(IndexError):
        Graph.from_edges(3, [(0, 3)])


def test_graph_is_immutable():
    g = path_graph(4)
    with pytest.raises(ValueError):
        g.degrees[0] = 5
    with pytest.raises(ValueError):
        g.adjacency.data[0] = 0


def test_features_and_labels_validated():
    with pytest.raises(GraphFormatError):
        Graph.from_edges(3, [(0, 1)], features=np.ones((2, 4)))
    with pytest.raises(GraphFormatError):
        Graph.from_edges(3, [(0, 1)], labels=[0, 1])
    g = Graph.from_edges(3, [(0, 1)], labels=[0, 2, 1])
    assert g.n_labels == 3


def test_edge_list_text_with_comments_and_commas():
    text = "# header\n10, 20\n20 30  # trailing\n\n30 10\n"
    g = load_edge_list(text)
    assert g.n == 3 and g.m == 3
    assert g.node_ids.tolist() == [10, 20, 30]


def test_edge_list_reports_line_number():
    with pytest.raises(GraphFormatError, match="line 2"):
        load_edge_list("0 1\n0 x\n")
    with pytest.raises(GraphFormatError, match="line 1"):
        load_edge_list("7\n")


def test_edge_list_drops_self_loops(caplog):
    g = load_edge_list("0 0\n0 1\n")
    assert g.m == 1
    assert "self-loop" in caplog.text


def test_edge_list_round_trip(tmp_path):
    g = gnp_graph(30, 0.1, seed=2)
    path = tmp_path / "g.txt"
    save_edge_list(g, path)
    h = load_edge_list(path, n=g.n)
    assert h == g


def test_load_npz(tmp_path):
    adj = sp.csr_matrix(np.array([[0, 1, 0], [0, 0, 1], [0, 0, 1]]))  # directed, one self-loop
    attr = sp.csr_matrix(np.eye(3))
    np.savez(tmp_path / "d.npz", adj_data=adj.data, adj_indices=adj.indices, adj_indptr=adj.indptr,
             adj_shape=adj.shape, attr_data=attr.data, attr_indices=attr.indices, attr_indptr=attr.indptr,
             attr_shape=attr.shape, labels=np.array([0, 1, 1]))
    g = load_npz(tmp_path / "d.npz")
    assert g.edges().tolist() == [[0, 1], [1, 2]]
    assert g.features.shape == (3, 3) and g.labels.tolist() == [0, 1, 1]


def test_load_linqs(tmp_path):
    (tmp_path / "x.content").write_text("p1 1 0 A\np2 0 1 B\np3 1 1 A\n")
    (tmp_path / "x.cites").write_text("p1 p2\np3 p1\np2 ghost\np2 p2\n")
    g = load_linqs(tmp_path / "x.content", tmp_path / "x.cites")
    assert g.n == 3 and g.edges().tolist() == [[0, 1], [0, 2]]
    assert g.labels.tolist() == [0, 1, 0]
    assert g.features.tolist() == [[1, 0], [0, 1], [1, 1]]


def test_connected_components_and_lcc():
    g = Graph.from_edges(7, [(5, 6), (0, 1), (2, 3), (3, 4)])
    assert connected_components(g).tolist() == [0, 0, 1, 1, 1, 2, 2]
    lcc = extract_lcc(g)
    assert lcc.n == 3 and lcc.node_ids.tolist() == [2, 3, 4]


def test_lcc_tie_goes_to_smallest_id():
    g = Graph.from_edges(4, [(2, 3), (0, 1)])
    assert extract_lcc(g).node_ids.tolist() == [0, 1]


def test_add_and_remove_edges():
    g = path_graph(4)
    h = add_edges(g, EdgeSet(((3, 0),)))
    assert h.m == 4 and h.has_edge(0, 3)
    assert g.m == 3  # original untouched
    k = remove_edges(h, EdgeSet(((1, 2),)))
    assert k.m == 3 and not k.has_edge(1, 2)
    assert degree_sequence(k).tolist() == [2, 1, 1, 2]


def test_edge_set_semantics():
    e = EdgeSet(((3, 1), (0, 2)))
    assert (1, 3) in e and (3, 1) in e and (1, 2) not in e
    assert e.to_array().tolist() == [[3, 1], [0, 2]]
    with pytest.raises(ValueError):
        EdgeSet(((1, 3), (3, 1)))
    with pytest.raises(ValueError):
        EdgeSet(((2, 2),))
    assert not e.isdisjoint(EdgeSet(((1, 3),)))


@pytest.mark.parametrize("graph", [path_graph(5), cycle_graph(6), star_graph(4), complete_graph(5),
                                   gnp_graph(40, 0.15, seed=1)])
def test_clustering_matches_networkx(backend, graph):
    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(graph.edges().tolist())
    ref = nx.clustering(g)
    np.testing.assert_allclose(local_clustering_coefficients(graph), [ref[i] for i in range(graph.n)])
