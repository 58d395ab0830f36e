import numpy as np
import pytest

from cgbp.errors import GenerationError, ParameterError, ParseError
from cgbp.graph import (Graph, degree_norm, from_edges, generate_regular,
                        load_dimacs_col, load_graph, load_gset, queen_graph,
                        save_dimacs_col, save_gset, validate)


def test_from_edges_canonical_order():
    g = from_edges(4, [(2, 0), (3, 1), (0, 1)])
    assert g.n_nodes == 4
    assert g.n_edges == 3
    assert g.edge_list.tolist() == [[0, 1], [0, 2], [1, 3]]
    assert g.row_offsets.tolist() == [0, 2, 4, 5, 6]
    assert g.neighbor_ids.tolist() == [1, 2, 0, 3, 0, 1]
    validate(g)


def test_from_edges_degrees_and_neighbors():
    g = from_edges(5, [(0, 1), (1, 2), (1, 3)])
    assert g.degrees.tolist() == [1, 3, 1, 1, 0]
    assert g.neighbors(1).tolist() == [0, 2, 3]
    assert g.neighbors(4).tolist() == []


def test_from_edges_rejects_self_loop():
    with pytest.raises(ParameterError, match="self-loop at node 2"):
        from_edges(4, [(0, 1), (2, 2)])


def test_from_edges_rejects_duplicates_unless_dedupe():
    with pytest.raises(ParameterError, match="duplicate edge"):
        from_edges(3, [(0, 1), (1, 0)])
    g = from_edges(3, [(0, 1), (1, 0), (1, 2)], dedupe=True)
    assert g.n_edges == 2


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ParameterError):
        from_edges(3, [(0, 3)])
    with pytest.raises(ParameterError):
        from_edges(0, [])


def test_empty_graph():
    g = from_edges(3, [])
    assert g.n_edges == 0
    assert g.degrees.tolist() == [0, 0, 0]
    validate(g)


def test_validate_catches_asymmetry():
    g = from_edges(3, [(0, 1)])
    bad = Graph(n_nodes=3, n_edges=1,
                row_offsets=np.array([0, 1, 1, 2], dtype=np.int64),
                neighbor_ids=np.array([1, 1], dtype=np.int64),
                edge_list=g.edge_list)
    with pytest.raises(ValueError):
        validate(bad)


def test_degree_norm_path_graph():
    # path 0-1-2: deg = (1, 2, 1), entry weight 1/sqrt(deg_i deg_j)
    g = from_edges(3, [(0, 1), (1, 2)])
    inv_c = degree_norm(g).inv_c
    s = 1.0 / np.sqrt(2.0)
    assert np.allclose(inv_c, [s, s, s, s])


def test_generate_regular_is_regular_and_deterministic():
    g = generate_regular(20, 3, seed=7)
    validate(g)
    assert g.n_nodes == 20
    assert np.all(g.degrees == 3)
    h = generate_regular(20, 3, seed=7)
    assert np.array_equal(g.edge_list, h.edge_list)
    k = generate_regular(20, 3, seed=8)
    assert not np.array_equal(g.edge_list, k.edge_list)


def test_generate_regular_complete_graph():
    # n=4, d=3 has exactly one simple realization: K4
    g = generate_regular(4, 3, seed=0)
    assert g.edge_list.tolist() == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]


def test_generate_regular_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        generate_regular(5, 3, seed=0)   # odd n*d
    with pytest.raises(ParameterError):
        generate_regular(4, 4, seed=0)   # d >= n
    with pytest.raises(GenerationError):
        generate_regular(2, 1, seed=0, max_retries=0)


def test_queen_graph_counts():
    # published instance sizes
    for (r, c), (nodes, edges) in {(5, 5): (25, 160), (8, 12): (96, 1368),
                                   (13, 13): (169, 3328)}.items():
        g = queen_graph(r, c)
        validate(g)
        assert (g.n_nodes, g.n_edges) == (nodes, edges)


def test_queen_graph_2x2_is_complete():
    g = queen_graph(2)
    assert g.n_edges == 6
    assert np.all(g.degrees == 3)


def test_gset_round_trip(tmp_path):
    g = generate_regular(16, 3, seed=1)
    path = tmp_path / "g.txt"
    save_gset(g, path)
    h = load_gset(path)
    assert h.n_nodes == g.n_nodes
    assert np.array_equal(h.edge_list, g.edge_list)


def test_gset_parses_weights_with_flag(tmp_path, caplog):
    path = tmp_path / "w.txt"
    path.write_text("3 2\n1 2 5\n2 3 1\n")
    with pytest.raises(ParseError, match="line 2"):
        load_gset(path)
    with caplog.at_level("WARNING"):
        g = load_gset(path, allow_weights=True)
    assert g.n_edges == 2
    assert "mapped to 1" in caplog.text


@pytest.mark.parametrize("text,line", [
    ("", None),
    ("3\n", 1),
    ("3 x\n", 1),
    ("3 1\n1 2 1 9\n", 2),
    ("3 1\n1 4\n", 2),
    ("3 1\n2 2\n", 2),
    ("3 1\n1 2\n2 3\n", 3),
    ("3 2\n1 2\n", None),
    ("3 2\n1 2\n1 2\n", None),
])
def test_gset_parse_errors_carry_line(tmp_path, text, line):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ParseError) as err:
        load_gset(path)
    assert err.value.line == line
    assert str(path) in str(err.value)


def test_gset_skips_blank_lines(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("\n3 2\n1 2\n\n2 3\n")
    g = load_gset(path)
    assert g.n_edges == 2


def test_dimacs_round_trip(tmp_path):
    g = queen_graph(4)
    path = tmp_path / "q.col"
    save_dimacs_col(g, path)
    h = load_dimacs_col(path)
    assert h.n_nodes == g.n_nodes
    assert np.array_equal(h.edge_list, g.edge_list)


def test_dimacs_comments_and_duplicates(tmp_path, caplog):
    path = tmp_path / "d.col"
    path.write_text("c a comment\np edge 3 3\ne 1 2\ne 2 1\ne 2 3\n")
    with caplog.at_level("WARNING"):
        g = load_dimacs_col(path)
    assert g.n_edges == 2
    assert "declared 3" in caplog.text


@pytest.mark.parametrize("text,line", [
    ("e 1 2\n", 1),
    ("p edge 3 1\np edge 3 1\n", 2),
    ("p huh 3 1\n", 1),
    ("p edge 3 1\ne 1 4\n", 2),
    ("p edge 3 1\ne 2 2\n", 2),
    ("p edge 3 1\nq 1 2\n", 2),
    ("c only comments\n", None),
])
def test_dimacs_parse_errors_carry_line(tmp_path, text, line):
    path = tmp_path / "bad.col"
    path.write_text(text)
    with pytest.raises(ParseError) as err:
        load_dimacs_col(path)
    assert err.value.line == line


def test_load_graph_dispatches_on_extension(tmp_path):
    g = generate_regular(10, 3, seed=0)
    gset_path = tmp_path / "a.txt"
    col_path = tmp_path / "a.col"
    save_gset(g, gset_path)
    save_dimacs_col(g, col_path)
    assert np.array_equal(load_graph(gset_path).edge_list, g.edge_list)
    assert np.array_equal(load_graph(col_path).edge_list, g.edge_list)
