"""Bipartite interference graphs: representation, parsing and fork removal."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable


class GraphError(ValueError):
    """Raised for malformed graph documents or invalid node references."""


class IsolatedNodeError(GraphError):
    """A U-node without any V-neighbor; it can never be permanently blocked."""


@dataclass(frozen=True)
class BipartiteGraph:
    """Interference graph ``G = ((U, V), E)``.

    Node identifiers are opaque strings. Iteration order of both sides is the
    declaration order, which keeps seeded tie-breaking reproducible.
    """

    u_nodes: tuple[str, ...]
    v_nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    _nbrs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        u_set, v_set = set(self.u_nodes), set(self.v_nodes)
        if len(u_set) != len(self.u_nodes):
            raise GraphError("duplicate node identifier on side U")
        if len(v_set) != len(self.v_nodes):
            raise GraphError("duplicate node identifier on side V")
        both = u_set & v_set
        if both:
            raise GraphError(f"node declared on both sides: {sorted(both)[0]}")
        nbrs: dict[str, set[str]] = {w: set() for w in self.u_nodes + self.v_nodes}
        for u, v in self.edges:
            if u not in u_set or v not in v_set:
                raise GraphError(f"edge ({u}, {v}) does not join U to V")
            nbrs[u].add(v)
            nbrs[v].add(u)
        object.__setattr__(self, "_nbrs", nbrs)

    @classmethod
    def from_edges(
        cls, u_nodes: Iterable[str], v_nodes: Iterable[str], edges: Iterable[tuple[str, str]]
    ) -> "BipartiteGraph":
        edge_list = [(str(u), str(v)) for u, v in edges]
        edge_set = frozenset(edge_list)
        if len(edge_set) != len(edge_list):
            dup = next(e for e in edge_list if edge_list.count(e) > 1)
            raise GraphError(f"duplicate edge {dup[0]} {dup[1]}")
        return cls(tuple(map(str, u_nodes)), tuple(map(str, v_nodes)), edge_set)

    @property
    def n_v(self) -> int:
        return len(self.v_nodes)

    def neighbors(self, w: str) -> frozenset[str]:
        try:
            return frozenset(self._nbrs[w])
        except KeyError:
            raise GraphError(f"unknown node {w!r}") from None

    def isolated_u_nodes(self) -> list[str]:
        return [u for u in self.u_nodes if not self._nbrs[u]]

    def sorted_edges(self) -> list[tuple[str, str]]:
        """Edges in declaration order of (u, v)."""
        u_pos = {u: i for i, u in enumerate(self.u_nodes)}
        v_pos = {v: i for i, v in enumerate(self.v_nodes)}
        return sorted(self.edges, key=lambda e: (u_pos[e[0]], v_pos[e[1]]))


def degree(g: BipartiteGraph, v: str) -> int:
    if v not in g._nbrs or v not in g.v_nodes:
        raise GraphError(f"unknown V-node {v!r}")
    return len(g._nbrs[v])


def remove_fork(g: BipartiteGraph, v: str) -> BipartiteGraph:
    """Remove ``v``, its U-neighbors and every edge touching them."""
    if v not in g.v_nodes:
        raise GraphError(f"unknown V-node {v!r}")
    gone = g._nbrs[v]
    return BipartiteGraph(
        tuple(u for u in g.u_nodes if u not in gone),
        tuple(w for w in g.v_nodes if w != v),
        frozenset((a, b) for a, b in g.edges if a not in gone and b != v),
    )


def min_degree_set(g: BipartiteGraph) -> tuple[int, tuple[str, ...], int]:
    """Return ``(d_bar, nodes, n)``: minimum V-degree, the nodes attaining it, their count."""
    if not g.v_nodes:
        raise GraphError("graph has an empty V side")
    degs = [len(g._nbrs[v]) for v in g.v_nodes]
    d_bar = min(degs)
    nodes = tuple(v for v, d in zip(g.v_nodes, degs) if d == d_bar)
    return d_bar, nodes, len(nodes)


def is_complete_bipartite(g: BipartiteGraph) -> bool:
    return bool(g.u_nodes and g.v_nodes) and len(g.edges) == len(g.u_nodes) * len(g.v_nodes)


# --------------------------------------------------------------------------
# text / JSON formats


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_edge_tokens(tokens: list[str], lineno: int) -> list[tuple[str, str]]:
    if len(tokens) % 2:
        raise GraphError(f"line {lineno}: odd number of tokens in edge list")
    return [(tokens[i], tokens[i + 1]) for i in range(0, len(tokens), 2)]


def _parse_edge_list(text: str) -> tuple[list[str], list[str], list[tuple[str, str]]]:
    u_nodes: list[str] | None = None
    v_nodes: list[str] | None = None
    edges: list[tuple[str, str]] = []
    in_edges = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        head, sep, rest = line.partition(":")
        key = head.strip()
        if sep and key in ("U", "V", "E"):
            tokens = rest.split()
            if key == "U":
                if u_nodes is not None or in_edges:
                    raise GraphError(f"line {lineno}: unexpected U declaration")
                u_nodes = tokens
            elif key == "V":
                if u_nodes is None or v_nodes is not None or in_edges:
                    raise GraphError(f"line {lineno}: V must follow U and come once")
                v_nodes = tokens
            else:
                if v_nodes is None or in_edges:
                    raise GraphError(f"line {lineno}: E must follow U and V and come once")
                in_edges = True
                edges.extend(_parse_edge_tokens(tokens, lineno))
        elif in_edges:
            edges.extend(_parse_edge_tokens(line.split(), lineno))
        else:
            raise GraphError(f"line {lineno}: malformed line {raw.strip()!r}")
    if u_nodes is None or v_nodes is None:
        raise GraphError("missing U or V declaration")
    return u_nodes, v_nodes, edges


def parse_graph(text: str, permissive: bool = False) -> BipartiteGraph:
    """Parse the edge-list text format, or its JSON equivalent.

    Text form::

        U: u1 u2
        V: v1
        E:
        u1 v1
        u2 v1   # comment

    JSON form: ``{"u": [...], "v": [...], "edges": [["u1", "v1"], ...]}``.

    U-nodes without neighbors raise :class:`IsolatedNodeError` unless
    ``permissive`` is set.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
            u_nodes, v_nodes = list(doc["u"]), list(doc["v"])
            edges = [tuple(e) for e in doc.get("edges", [])]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise GraphError(f"malformed JSON graph: {exc}") from None
        if any(len(e) != 2 for e in edges):
            raise GraphError("JSON edges must be [u, v] pairs")
    else:
        u_nodes, v_nodes, edges = _parse_edge_list(text)

    declared = set(u_nodes) | set(v_nodes)
    for u, v in edges:
        for w in (u, v):
            if w not in declared:
                raise GraphError(f"edge ({u}, {v}) references undeclared node {w!r}")
    g = BipartiteGraph.from_edges(u_nodes, v_nodes, edges)
    isolated = g.isolated_u_nodes()
    if isolated and not permissive:
        raise IsolatedNodeError(
            f"U-node {isolated[0]!r} has no V-neighbor; pass permissive=True to accept"
        )
    return g


def serialize_graph(g: BipartiteGraph) -> str:
    """Canonical edge-list text; ``parse_graph`` inverts it."""
    lines = ["U: " + " ".join(g.u_nodes), "V: " + " ".join(g.v_nodes), "E:"]
    lines += [f"{u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def graph_to_json(g: BipartiteGraph) -> dict:
    return {"u": list(g.u_nodes), "v": list(g.v_nodes), "edges": [list(e) for e in g.sorted_edges()]}


def load_graph(path, permissive: bool = False) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), permissive=permissive)
