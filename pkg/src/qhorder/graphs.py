"""Immutable graph and digraph values: construction, composition, serialization.

Vertex identifiers are opaque nonempty strings.  Composition operations mint
fresh identifiers by prefixing ("p0.", "p1.", ...) so downstream metadata can
rely on stable, human-readable names.  All values are immutable after
construction and every operation is a pure function, so concurrent use is
safe.  Loops, parallel edges/arcs and dangling endpoints are rejected at
construction time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

__all__ = [
    "GraphError",
    "ParseError",
    "Graph",
    "Digraph",
    "DiCycles",
    "graph",
    "digraph",
    "dicycles",
    "directed_cycle",
    "dicycles_to_digraph",
    "disjoint_union",
    "weak_components",
    "induced",
    "serialize",
    "parse",
    "to_dot",
]


class GraphError(ValueError):
    """Invalid graph data or an operation on incompatible kinds."""


class ParseError(GraphError):
    """Invalid serialized graph; ``where`` names the offending field."""

    def __init__(self, where: str, reason: str):
        super().__init__(f"{where}: {reason}")
        self.where = where
        self.reason = reason


Labels = dict[str, dict[str, str]]


def _checked_vertices(vertices: Iterable[str]) -> tuple[str, ...]:
    out: list[str] = []
    seen: set[str] = set()
    for v in vertices:
        if not isinstance(v, str) or not v:
            raise GraphError(f"vertex identifier must be a nonempty string, got {v!r}")
        if v in seen:
            raise GraphError(f"duplicate vertex {v!r}")
        seen.add(v)
        out.append(v)
    return tuple(out)


def _checked_labels(labels: Mapping | None, vertex_set: set[str]) -> Labels:
    if not labels:
        return {}
    out: Labels = {}
    for v, attrs in labels.items():
        if v not in vertex_set:
            raise GraphError(f"label for unknown vertex {v!r}")
        out[v] = {str(k): str(val) for k, val in dict(attrs).items()}
    return out


@dataclass(frozen=True)
class Graph:
    """Finite loopless simple undirected graph."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    labels: Labels = field(default_factory=dict)

    kind = "graph"
    directed = False

    @cached_property
    def _adj(self) -> dict[str, frozenset[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._adj[v]))

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class Digraph:
    """Finite loopless directed graph without parallel arcs."""

    vertices: tuple[str, ...]
    arcs: frozenset[tuple[str, str]]
    labels: Labels = field(default_factory=dict)

    kind = "digraph"
    directed = True

    @cached_property
    def _out(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.arcs:
            out[u].add(v)
        return {v: frozenset(ns) for v, ns in out.items()}

    @cached_property
    def _in(self) -> dict[str, frozenset[str]]:
        inn: dict[str, set[str]] = {v: set() for v in self.vertices}
        for u, v in self.arcs:
            inn[v].add(u)
        return {v: frozenset(ns) for v, ns in inn.items()}

    def out_neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._out[v]))

    def in_neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._in[v]))

    def has_arc(self, u: str, v: str) -> bool:
        return v in self._out.get(u, ())

    def sorted_arcs(self) -> list[tuple[str, str]]:
        return sorted(self.arcs)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)


def graph(vertices: Iterable[str], edges: Iterable[Sequence[str]] = (), labels: Mapping | None = None) -> Graph:
    """Build an undirected graph, validating loops, duplicates and endpoints."""
    vs = _checked_vertices(vertices)
    vset = set(vs)
    norm: set[tuple[str, str]] = set()
    for e in edges:
        u, v = e
        for w in (u, v):
            if w not in vset:
                raise GraphError(f"unknown endpoint {w!r} in edge ({u!r}, {v!r})")
        if u == v:
            raise GraphError(f"loop at {u!r}")
        key = (u, v) if u <= v else (v, u)
        if key in norm:
            raise GraphError(f"duplicate edge ({key[0]!r}, {key[1]!r})")
        norm.add(key)
    return Graph(vs, frozenset(norm), _checked_labels(labels, vset))


def digraph(vertices: Iterable[str], arcs: Iterable[Sequence[str]] = (), labels: Mapping | None = None) -> Digraph:
    """Build a digraph, validating loops, duplicate arcs and endpoints."""
    vs = _checked_vertices(vertices)
    vset = set(vs)
    seen: set[tuple[str, str]] = set()
    for a in arcs:
        u, v = a
        for w in (u, v):
            if w not in vset:
                raise GraphError(f"unknown endpoint {w!r} in arc ({u!r}, {v!r})")
        if u == v:
            raise GraphError(f"loop at {u!r}")
        if (u, v) in seen:
            raise GraphError(f"duplicate arc ({u!r}, {v!r})")
        seen.add((u, v))
    return Digraph(vs, frozenset(seen), _checked_labels(labels, vset))


@dataclass(frozen=True)
class DiCycles:
    """Multiset of directed-cycle lengths, each at least 2, stored sorted."""

    lengths: tuple[int, ...]


def dicycles(lengths: Iterable[int]) -> DiCycles:
    out = []
    for n in lengths:
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise GraphError(f"cycle length must be an integer >= 2, got {n!r}")
        out.append(n)
    return DiCycles(tuple(sorted(out)))


def directed_cycle(n: int) -> Digraph:
    """Clockwise directed cycle c0 -> c1 -> ... -> c(n-1) -> c0."""
    if not isinstance(n, int) or isinstance(n, bool):
        raise GraphError(f"cycle length must be an integer, got {n!r}")
    if n == 1:
        raise GraphError("cycle of length 1 rejected: a loop would be created")
    if n < 2:
        raise GraphError(f"cycle length must be at least 2, got {n}")
    names = [f"c{i}" for i in range(n)]
    return digraph(names, [(names[i], names[(i + 1) % n]) for i in range(n)])


def disjoint_union(parts: Sequence[Graph | Digraph]):
    """Disjoint union with fresh identifiers "p{i}.<name>"; empty input gives the empty graph."""
    parts = list(parts)
    if not parts:
        return graph((), ())
    kinds = {p.kind for p in parts}
    if len(kinds) > 1:
        raise GraphError("cannot union graphs with digraphs")
    vertices: list[str] = []
    pairs: list[tuple[str, str]] = []
    labels: Labels = {}
    for i, part in enumerate(parts):
        prefix = f"p{i}."
        vertices.extend(prefix + v for v in part.vertices)
        raw = part.arcs if part.directed else part.edges
        pairs.extend((prefix + u, prefix + v) for (u, v) in sorted(raw))
        for v, attrs in part.labels.items():
            labels[prefix + v] = dict(attrs)
    if parts[0].directed:
        return digraph(vertices, pairs, labels)
    return graph(vertices, pairs, labels)


def dicycles_to_digraph(d: DiCycles) -> Digraph:
    """Expand a multiset of cycle lengths into the disjoint union of directed cycles."""
    if not d.lengths:
        return digraph((), ())
    return disjoint_union([directed_cycle(n) for n in d.lengths])


def _undirected_adj(g: Graph | Digraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for u, v in g.arcs if g.directed else g.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def weak_components(g: Graph | Digraph) -> list[tuple[str, ...]]:
    """Partition into weakly connected components, ordered by smallest identifier."""
    adj = _undirected_adj(g)
    seen: set[str] = set()
    comps: list[tuple[str, ...]] = []
    for start in sorted(g.vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(tuple(sorted(comp)))
    return comps


def induced(g: Graph | Digraph, vertices: Iterable[str]):
    """Induced subgraph on the given vertex subset, preserving stored order and labels."""
    keep = set(vertices)
    unknown = keep - set(g.vertices)
    if unknown:
        raise GraphError(f"unknown vertex {sorted(unknown)[0]!r}")
    vs = tuple(v for v in g.vertices if v in keep)
    labels = {v: dict(a) for v, a in g.labels.items() if v in keep}
    if g.directed:
        return digraph(vs, [(u, v) for (u, v) in g.sorted_arcs() if u in keep and v in keep], labels)
    return graph(vs, [(u, v) for (u, v) in g.sorted_edges() if u in keep and v in keep], labels)


def serialize(g: Graph | Digraph) -> str:
    """JSON form; undirected edges are stored with endpoints sorted.  Inverse of parse."""
    data: dict = {
        "kind": g.kind,
        "vertices": list(g.vertices),
        "edges": [list(p) for p in (g.sorted_arcs() if g.directed else g.sorted_edges())],
    }
    if g.labels:
        data["labels"] = {v: dict(sorted(g.labels[v].items())) for v in sorted(g.labels)}
    return json.dumps(data, indent=2) + "\n"


def parse(text: str) -> Graph | Digraph:
    """Parse the JSON graph format, reporting the first offending field."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("$", "expected a JSON object")
    extra = sorted(set(data) - {"kind", "vertices", "edges", "labels"})
    if extra:
        raise ParseError(extra[0], "unexpected field")
    kind = data.get("kind")
    if kind not in ("graph", "digraph"):
        raise ParseError("kind", f'expected "graph" or "digraph", got {kind!r}')
    directed = kind == "digraph"

    raw_vs = data.get("vertices")
    if not isinstance(raw_vs, list):
        raise ParseError("vertices", "expected a list of strings")
    seen: set[str] = set()
    for i, v in enumerate(raw_vs):
        if not isinstance(v, str) or not v:
            raise ParseError(f"vertices[{i}]", f"expected a nonempty string, got {v!r}")
        if v in seen:
            raise ParseError(f"vertices[{i}]", f"duplicate vertex {v!r}")
        seen.add(v)

    raw_es = data.get("edges", [])
    if not isinstance(raw_es, list):
        raise ParseError("edges", "expected a list of pairs")
    pairs: list[tuple[str, str]] = []
    dup: set[tuple[str, str]] = set()
    for i, e in enumerate(raw_es):
        if not isinstance(e, list) or len(e) != 2 or not all(isinstance(w, str) for w in e):
            raise ParseError(f"edges[{i}]", f"expected a pair of strings, got {e!r}")
        u, v = e
        for w in (u, v):
            if w not in seen:
                raise ParseError(f"edges[{i}]", f"unknown endpoint {w!r}")
        if u == v:
            raise ParseError(f"edges[{i}]", f"loop at {u!r}")
        key = (u, v) if directed else ((u, v) if u <= v else (v, u))
        if key in dup:
            raise ParseError(f"edges[{i}]", "duplicate edge" if not directed else "duplicate arc")
        dup.add(key)
        pairs.append((u, v))

    raw_labels = data.get("labels", {})
    if not isinstance(raw_labels, dict):
        raise ParseError("labels", "expected an object")
    for v, attrs in raw_labels.items():
        if v not in seen:
            raise ParseError(f"labels[{v!r}]", "unknown vertex")
        if not isinstance(attrs, dict) or not all(
            isinstance(k, str) and isinstance(val, str) for k, val in attrs.items()
        ):
            raise ParseError(f"labels[{v!r}]", "expected string-to-string attributes")

    if directed:
        return digraph(raw_vs, pairs, raw_labels)
    return graph(raw_vs, pairs, raw_labels)


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: Graph | Digraph, name: str = "G") -> str:
    """One-way DOT export; vertex labels become node attributes."""
    head = "digraph" if g.directed else "graph"
    arrow = "->" if g.directed else "--"
    lines = [f"{head} {_dot_quote(name)[1:-1]} {{"]
    for v in sorted(g.vertices):
        attrs = g.labels.get(v, {})
        if attrs:
            body = ", ".join(f"{k}={_dot_quote(val)}" for k, val in sorted(attrs.items()))
            lines.append(f"  {_dot_quote(v)} [{body}];")
        else:
            lines.append(f"  {_dot_quote(v)};")
    for u, v in g.sorted_arcs() if g.directed else g.sorted_edges():
        lines.append(f"  {_dot_quote(u)} {arrow} {_dot_quote(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
