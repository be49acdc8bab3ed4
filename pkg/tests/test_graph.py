import json

import pytest
from hypothesis import given

from bipartite_access.graph import (
    BipartiteGraph,
    GraphError,
    IsolatedNodeError,
    degree,
    is_complete_bipartite,
    min_degree_set,
    parse_graph,
    remove_fork,
    serialize_graph,
)
from strategies import bipartite_graphs


def test_smallest_graph():
    g = parse_graph("U: u1\nV: v1\nE: u1 v1")
    assert (len(g.u_nodes), len(g.v_nodes), len(g.edges)) == (1, 1, 1)


def test_edgeless_graph_needs_permissive():
    with pytest.raises(IsolatedNodeError):
        parse_graph("U: u1 u2\nV: v1\nE:")
    g = parse_graph("U: u1 u2\nV: v1\nE:", permissive=True)
    assert degree(g, "v1") == 0


def test_fig4_degrees(fig4):
    assert [degree(fig4, v) for v in ("v1", "v2", "v3", "v4")] == [3, 2, 6, 2]
    assert len(fig4.edges) == 13


def test_unknown_node(fig4):
    with pytest.raises(GraphError):
        degree(fig4, "v9")
    with pytest.raises(GraphError):
        degree(fig4, "u1")
    with pytest.raises(GraphError):
        remove_fork(fig4, "v9")


def test_remove_fork_examples(fig4):
    g = remove_fork(fig4, "v2")
    assert {v: degree(g, v) for v in g.v_nodes} == {"v1": 1, "v3": 4, "v4": 2}
    g = remove_fork(fig4, "v4")
    assert {v: degree(g, v) for v in g.v_nodes} == {"v1": 3, "v2": 2, "v3": 4}
    assert len(fig4.v_nodes) == 4  # input untouched


def test_remove_isolated_v():
    g = parse_graph("U: u1\nV: v1 v2\nE: u1 v1")
    h = remove_fork(g, "v2")
    assert h.u_nodes == ("u1",) and h.v_nodes == ("v1",)


def test_min_degree_set(fig4):
    assert min_degree_set(fig4) == (2, ("v2", "v4"), 2)
    assert min_degree_set(remove_fork(fig4, "v2")) == (1, ("v1",), 1)
    g = parse_graph("U: u1\nV: a b c\nE: u1 a", permissive=True)
    assert min_degree_set(remove_fork(g, "a")) == (0, ("b", "c"), 2)


def test_min_degree_set_empty_v():
    with pytest.raises(GraphError):
        min_degree_set(BipartiteGraph((), (), frozenset()))


@pytest.mark.parametrize(
    "text, match",
    [
        ("U: u1\nV: v1\nE: u1 v1\nu1 v1", "duplicate edge"),
        ("U: u1\nV: v1\nE: u1 v2", "undeclared"),
        ("U: x\nV: x\nE:", "both sides"),
        ("U: u1\nV: v1\nE: v1 u1", "does not join"),
        ("U: u1\nhello\n", "malformed"),
        ("V: v1\nU: u1\n", "V must follow U"),
        ("U: u1\nV: v1\nE: u1", "odd number"),
        ('{"u": ["u1"]}', "malformed JSON"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(GraphError, match=match):
        parse_graph(text)


def test_comments_and_json_form(fig4):
    text = "# header\nU: u1 u2  # two\nV: v1\nE:\nu1 v1\nu2 v1 # end\n"
    g = parse_graph(text)
    h = parse_graph(json.dumps({"u": ["u1", "u2"], "v": ["v1"], "edges": [["u1", "v1"], ["u2", "v1"]]}))
    assert g == h
    assert is_complete_bipartite(g) and not is_complete_bipartite(fig4)


@given(bipartite_graphs())
def test_serialize_roundtrip(g):
    assert parse_graph(serialize_graph(g), permissive=True) == g


@given(bipartite_graphs())
def test_remove_fork_shrinks_and_is_monotone(g):
    for v in g.v_nodes:
        h = remove_fork(g, v)
        assert len(h.v_nodes) == len(g.v_nodes) - 1
        assert len(h.u_nodes) == len(g.u_nodes) - degree(g, v)
        for w in h.v_nodes:
            assert degree(h, w) <= degree(g, w)
