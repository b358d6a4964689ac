"""Color gadgets, the ordered two-terminal indicator, and arc replacement.

Three plain graph attachments implement recognizable "colors":

* an A-root is the apex of a cone over a private 5-cycle,
* a B-root is adjacent to two adjacent private A-roots,
* an E-root is adjacent to two adjacent private B-roots.

The indicator J(a, b) is a 7-vertex spine x0..x6 carrying colors
E,A,A,B,B,A,E; read backwards the sequence is E,A,B,B,A,A,E, so the spine
encodes direction.  Replacing every arc (u, v) of a digraph H by a fresh copy
of J, with terminals identified with u and v, yields an undirected graph
whose color structure remembers H's arcs: the only walks colored
E,A,A,B,B,A,E are the ordered copy spines.

Roles are stored as construction metadata and are independently re-derivable
by a structural detector; the verifier cross-checks the two.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graphs import (
    Digraph,
    Graph,
    GraphError,
    digraph,
    graph,
    parse,
    serialize,
)

__all__ = [
    "ROLE_A",
    "ROLE_B",
    "ROLE_E",
    "SPINE_COLORS",
    "RoleMap",
    "Indicator",
    "CopyRecord",
    "ReplacementGraph",
    "StructuralReport",
    "StructuralDefectError",
    "attach_gadget",
    "build_indicator",
    "replace",
    "color_sets",
    "detect_roles",
    "verify_structural",
    "colored_walks",
    "endpoint_certificate",
    "structural_mutants",
    "MUTANT_NAMES",
    "color_domains",
    "roles_from_labels",
    "replacement_to_json",
    "replacement_from_json",
]

ROLE_A = "A"
ROLE_B = "B"
ROLE_E = "E"

SPINE_COLORS = (ROLE_E, ROLE_A, ROLE_A, ROLE_B, ROLE_B, ROLE_A, ROLE_E)


class StructuralDefectError(GraphError):
    """A replacement graph failed a check that genuine constructions satisfy."""


@dataclass(frozen=True)
class RoleMap:
    """Partial vertex -> color assignment plus ownership of private gadget vertices."""

    role: dict[str, str]
    owner: dict[str, str]

    def merged(self, other: "RoleMap") -> "RoleMap":
        clash = set(self.role) & set(other.role)
        clash |= set(self.owner) & set(other.owner)
        if clash:
            raise GraphError(f"role metadata collision at {sorted(clash)[0]!r}")
        return RoleMap({**self.role, **other.role}, {**self.owner, **other.owner})

    def roots(self, letter: str) -> frozenset[str]:
        return frozenset(v for v, r in self.role.items() if r == letter)


def _make_gadget(root: str, kind: str):
    """Fresh private vertices/edges for one gadget rooted at ``root``."""
    vs: list[str] = []
    es: list[tuple[str, str]] = []
    role = {root: kind}
    owner: dict[str, str] = {}
    if kind == ROLE_A:
        cone = [f"{root}.ga{i}" for i in range(5)]
        vs.extend(cone)
        owner.update({c: root for c in cone})
        es.extend((cone[i], cone[(i + 1) % 5]) for i in range(5))
        es.extend((root, c) for c in cone)
    elif kind in (ROLE_B, ROLE_E):
        tag, sub_kind = ("gb", ROLE_A) if kind == ROLE_B else ("ge", ROLE_B)
        pair = [f"{root}.{tag}1", f"{root}.{tag}2"]
        vs.extend(pair)
        owner.update({p: root for p in pair})
        es.extend([(root, pair[0]), (root, pair[1]), (pair[0], pair[1])])
        for p in pair:
            sv, se, sr, so = _make_gadget(p, sub_kind)
            vs.extend(sv)
            es.extend(se)
            role.update(sr)
            owner.update(so)
    else:
        raise GraphError(f"unknown gadget kind {kind!r}")
    return vs, es, role, owner


def attach_gadget(g: Graph, v: str, kind: str) -> tuple[Graph, RoleMap]:
    """Attach a private color gadget at ``v``; returns the grown graph and the role delta."""
    if v not in set(g.vertices):
        raise GraphError(f"vertex {v!r} absent")
    vs, es, role, owner = _make_gadget(v, kind)
    clash = set(vs) & set(g.vertices)
    if clash:
        raise GraphError(f"gadget namespace collision at {sorted(clash)[0]!r}")
    grown = graph(g.vertices + tuple(vs), list(g.edges) + es, g.labels)
    return grown, RoleMap(role, owner)


@dataclass(frozen=True)
class Indicator:
    """Ordered two-terminal gadget: spine a=x0 .. x6=b colored E,A,A,B,B,A,E."""

    graph: Graph
    a: str
    b: str
    spine: tuple[str, ...]
    roles: RoleMap

    def spine_colors(self) -> tuple[str, ...]:
        return tuple(self.roles.role[v] for v in self.spine)


def build_indicator() -> Indicator:
    spine = tuple(f"x{i}" for i in range(7))
    g = graph(spine, [(spine[i], spine[i + 1]) for i in range(6)])
    roles = RoleMap({}, {})
    for i, letter in enumerate(SPINE_COLORS):
        g, delta = attach_gadget(g, spine[i], letter)
        roles = roles.merged(delta)
    labels: dict[str, dict[str, str]] = {}
    for v in g.vertices:
        attrs: dict[str, str] = {}
        if v in roles.role:
            attrs["role"] = roles.role[v]
        if v in spine:
            attrs["spine"] = str(spine.index(v))
        if v == spine[0]:
            attrs["terminal"] = "a"
        elif v == spine[6]:
            attrs["terminal"] = "b"
        if attrs:
            labels[v] = attrs
    g = graph(g.vertices, g.edges, labels)
    return Indicator(g, spine[0], spine[6], spine, roles)


@dataclass(frozen=True)
class CopyRecord:
    """One indicator copy inside a replacement graph."""

    arc: tuple[str, str]
    names: dict[str, str]  # indicator vertex -> replacement vertex

    @property
    def spine(self) -> tuple[str, ...]:
        return tuple(self.names[f"x{i}"] for i in range(7))

    @property
    def private(self) -> tuple[str, ...]:
        u, v = self.arc
        return tuple(sorted(w for w in self.names.values() if w not in (u, v)))


@dataclass(frozen=True)
class ReplacementGraph:
    """Undirected graph H*J plus the construction metadata."""

    graph: Graph
    host: Digraph
    connectors: tuple[str, ...]
    copies: dict[tuple[str, str], CopyRecord]
    roles: RoleMap

    def color_sets(self) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
        return color_sets(self)


def replace(host: Digraph, indicator: Indicator | None = None) -> ReplacementGraph:
    """Substitute every arc u->v of ``host`` by a fresh indicator copy with a=u, b=v.

    Connectors keep the host's names; nonterminal copy vertices are named
    "e{u}->{v}.<indicator name>".  Isolated host vertices stay isolated.
    """
    if not isinstance(host, Digraph):
        raise GraphError("replacement host must be a digraph")
    ind = indicator if indicator is not None else build_indicator()
    vertices: list[str] = list(host.vertices)
    edges: list[tuple[str, str]] = []
    role: dict[str, str] = {}
    owner: dict[str, str] = {}
    copies: dict[tuple[str, str], CopyRecord] = {}
    for u, v in host.sorted_arcs():
        prefix = f"e{u}->{v}."
        names: dict[str, str] = {}
        for jv in ind.graph.vertices:
            if jv == ind.a:
                names[jv] = u
            elif jv == ind.b:
                names[jv] = v
            else:
                names[jv] = prefix + jv
        vertices.extend(names[jv] for jv in ind.graph.vertices if names[jv] not in (u, v))
        edges.extend((names[p], names[q]) for p, q in ind.graph.sorted_edges())
        for jv, letter in ind.roles.role.items():
            role[names[jv]] = letter
        for gv, r in ind.roles.owner.items():
            owner[names[gv]] = names[r]
        copies[(u, v)] = CopyRecord((u, v), names)
    labels = {w: {"role": letter} for w, letter in role.items()}
    g = graph(tuple(vertices), edges, labels)
    return ReplacementGraph(g, host, tuple(host.vertices), copies, RoleMap(role, owner))


def color_sets(y: ReplacementGraph) -> tuple[frozenset[str], frozenset[str], frozenset[str]]:
    """(A(Y), B(Y), E(Y)); a connector is an E-root iff incident with at least one copy."""
    return (y.roles.roots(ROLE_A), y.roles.roots(ROLE_B), y.roles.roots(ROLE_E))


def _find_5cycle(g: Graph, candidates: Sequence[str]) -> tuple[str, ...] | None:
    cset = set(candidates)
    adj = {v: [w for w in g.neighbors(v) if w in cset] for v in candidates}

    def extend(path: list[str]) -> tuple[str, ...] | None:
        if len(path) == 5:
            return tuple(path) if path[0] in adj[path[-1]] else None
        for w in adj[path[-1]]:
            if w in path:
                continue
            found = extend(path + [w])
            if found:
                return found
        return None

    for start in sorted(candidates):
        found = extend([start])
        if found:
            return found
    return None


def detect_roles(g: Graph) -> dict[str, frozenset[str]]:
    """Re-derive colors from structure alone: cone over a 5-cycle, then adjacent pairs."""
    a_roots = {v for v in g.vertices if _find_5cycle(g, g.neighbors(v)) is not None}

    def pair_roots(lower: set[str]) -> set[str]:
        out = set()
        for v in g.vertices:
            inside = [w for w in g.neighbors(v) if w in lower]
            if _edge_within(g, inside) is not None:
                out.add(v)
        return out

    b_roots = pair_roots(a_roots)
    e_roots = pair_roots(b_roots)
    return {ROLE_A: frozenset(a_roots), ROLE_B: frozenset(b_roots), ROLE_E: frozenset(e_roots)}


def _edge_within(g: Graph, vertices: Sequence[str]) -> tuple[str, str] | None:
    vs = sorted(vertices)
    for i, u in enumerate(vs):
        for v in vs[i + 1 :]:
            if g.has_edge(u, v):
                return (u, v)
    return None


def _odd_cycle_in_induced(g: Graph, vertices: Sequence[str]) -> tuple[str, ...] | None:
    """Return an odd cycle inside the induced subgraph, or None if bipartite."""
    vs = set(vertices)
    color: dict[str, int] = {}
    parent: dict[str, str | None] = {}
    for start in sorted(vs):
        if start in color:
            continue
        color[start] = 0
        parent[start] = None
        queue = [start]
        while queue:
            u = queue.pop(0)
            for w in g.neighbors(u):
                if w not in vs:
                    continue
                if w not in color:
                    color[w] = color[u] ^ 1
                    parent[w] = u
                    queue.append(w)
                elif color[w] == color[u]:
                    up, wp = u, w
                    pu = [up]
                    pw = [wp]
                    while up != wp:
                        up = parent[up] if parent[up] is not None else up
                        wp = parent[wp] if parent[wp] is not None else wp
                        pu.append(up)
                        pw.append(wp)
                        if pu[-1] == pw[-1]:
                            break
                    # trim to the first common ancestor
                    anc = pu[-1]
                    cyc = pu[: pu.index(anc) + 1] + list(reversed(pw[: pw.index(anc)]))
                    return tuple(cyc)
    return None


@dataclass
class StructuralReport:
    """Outcome of the local color-structure checks on a replacement graph."""

    neighborhood_violations: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    a_pair_violations: list[tuple[str, tuple[str, str]]] = field(default_factory=list)
    b_pair_violations: list[tuple[str, tuple[str, str]]] = field(default_factory=list)
    role_mismatches: list[tuple[str, str | None, str | None]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.neighborhood_violations
            or self.a_pair_violations
            or self.b_pair_violations
            or self.role_mismatches
        )

    def counterexamples(self) -> int:
        return (
            len(self.neighborhood_violations)
            + len(self.a_pair_violations)
            + len(self.b_pair_violations)
            + len(self.role_mismatches)
        )


def verify_structural(y: ReplacementGraph) -> StructuralReport:
    """Check the color-structure guarantees of genuine replacement graphs.

    For every vertex v: if v is not an A-root its induced neighborhood must be
    bipartite; if not a B-root, no edge may join two A-roots in its
    neighborhood; if not an E-root, no edge may join two B-roots there.
    Stored roles are also cross-checked against the structural detector.
    """
    g = y.graph
    a_set, b_set, e_set = color_sets(y)
    report = StructuralReport()
    for v in g.vertices:
        nbrs = g.neighbors(v)
        if v not in a_set:
            odd = _odd_cycle_in_induced(g, nbrs)
            if odd:
                report.neighborhood_violations.append((v, odd))
        if v not in b_set:
            e = _edge_within(g, [w for w in nbrs if w in a_set])
            if e:
                report.a_pair_violations.append((v, e))
        if v not in e_set:
            e = _edge_within(g, [w for w in nbrs if w in b_set])
            if e:
                report.b_pair_violations.append((v, e))
    detected = detect_roles(g)
    for v in g.vertices:
        stored = y.roles.role.get(v)
        found = "".join(letter for letter in (ROLE_A, ROLE_B, ROLE_E) if v in detected[letter])
        if (stored or "") != found:
            report.role_mismatches.append((v, stored, found or None))
    return report


def colored_walks(y: ReplacementGraph, sequence: Sequence[str]) -> list[tuple[str, ...]]:
    """All walks whose vertex colors follow ``sequence`` (vertices may repeat)."""
    seq = tuple(sequence)
    if not seq or any(c not in (ROLE_A, ROLE_B, ROLE_E) for c in seq):
        raise GraphError(f"color sequence must be nonempty over A/B/E, got {seq!r}")
    g = y.graph
    role = y.roles.role
    allowed = [frozenset(v for v in g.vertices if role.get(v) == c) for c in seq]
    viable: list[set[str]] = [set(allowed[-1])]
    for i in range(len(seq) - 2, -1, -1):
        prev = viable[0]
        viable.insert(0, {v for v in allowed[i] if any(w in prev for w in g.neighbors(v))})

    walks: list[tuple[str, ...]] = []

    def extend(path: list[str]) -> None:
        i = len(path)
        if i == len(seq):
            walks.append(tuple(path))
            return
        for w in g.neighbors(path[-1]):
            if w in viable[i]:
                extend(path + [w])

    for v in sorted(viable[0]):
        extend([v])
    return walks


def endpoint_certificate(y: ReplacementGraph) -> set[tuple[str, str]]:
    """Endpoints of all E,A,A,B,B,A,E walks; must equal the host's arc set exactly."""
    walks = colored_walks(y, SPINE_COLORS)
    found = {(w[0], w[-1]) for w in walks}
    expected = set(y.host.arcs)
    if found != expected:
        raise StructuralDefectError(
            f"endpoint walks {sorted(found)} do not match host arcs {sorted(expected)}"
        )
    return found


MUTANT_NAMES = (
    "cone-chord",
    "spine-shortcut",
    "alpha-pair-into-cone",
    "beta-pair-into-alpha",
    "cone-edge-removed",
)


def _with_edges(
    y: ReplacementGraph, add: Iterable[tuple[str, str]] = (), remove: Iterable[tuple[str, str]] = ()
) -> ReplacementGraph:
    def norm(e: tuple[str, str]) -> tuple[str, str]:
        u, v = e
        return (u, v) if u <= v else (v, u)

    edges = {norm(e) for e in y.graph.edges}
    for e in remove:
        if norm(e) not in edges:
            raise GraphError(f"edge {e!r} not present")
        edges.discard(norm(e))
    for e in add:
        if norm(e) in edges:
            raise GraphError(f"edge {e!r} already present")
        edges.add(norm(e))
    g = graph(y.graph.vertices, sorted(edges), y.graph.labels)
    return dataclasses.replace(y, graph=g)


def structural_mutants(base: ReplacementGraph | None = None) -> dict[str, ReplacementGraph]:
    """Five fixed single-edge mutations, each of which verify_structural must reject."""
    y = base if base is not None else replace(digraph(("u", "v"), [("u", "v")]))
    if not y.copies:
        raise GraphError("mutant base must contain at least one copy")
    rec = y.copies[sorted(y.copies)[0]]
    n = rec.names
    return {
        "cone-chord": _with_edges(y, add=[(n["x1.ga0"], n["x1.ga2"])]),
        "spine-shortcut": _with_edges(y, add=[(n["x0"], n["x2"])]),
        "alpha-pair-into-cone": _with_edges(y, add=[(n["x3.gb1.ga0"], n["x3.gb2"])]),
        "beta-pair-into-alpha": _with_edges(y, add=[(n["x3.gb1"], n["x4"])]),
        "cone-edge-removed": _with_edges(y, remove=[(n["x1.ga0"], n["x1.ga1"])]),
    }


def color_domains(
    source_roles: RoleMap, source_graph: Graph, target: ReplacementGraph
) -> dict[str, set[str]]:
    """Classical-search domain filter: rooted vertices can only map to same-color roots.

    Sound for ordinary homomorphisms: the image of a cone apex keeps an odd
    closed walk in its neighborhood, and adjacent lower-root pairs map to
    adjacent lower-root pairs, so images inherit the structural color.
    """
    a_set, b_set, e_set = color_sets(target)
    sets = {ROLE_A: set(a_set), ROLE_B: set(b_set), ROLE_E: set(e_set)}
    everything = set(target.graph.vertices)
    out: dict[str, set[str]] = {}
    for v in source_graph.vertices:
        letter = source_roles.role.get(v)
        out[v] = sets[letter] if letter else everything
    return out


def roles_from_labels(g: Graph) -> RoleMap:
    """Recover a role map from serialized "role" vertex labels."""
    role = {v: attrs["role"] for v, attrs in g.labels.items() if attrs.get("role")}
    bad = sorted(r for r in set(role.values()) if r not in (ROLE_A, ROLE_B, ROLE_E))
    if bad:
        raise GraphError(f"unknown role label {bad[0]!r}")
    return RoleMap(role, {})


def replacement_to_json(y: ReplacementGraph) -> str:
    data = {
        "kind": "replacement",
        "graph": json.loads(serialize(y.graph)),
        "host": json.loads(serialize(y.host)),
        "connectors": list(y.connectors),
        "copies": [
            {"arc": list(arc), "names": dict(sorted(y.copies[arc].names.items()))}
            for arc in sorted(y.copies)
        ],
        "roles": {
            "role": dict(sorted(y.roles.role.items())),
            "owner": dict(sorted(y.roles.owner.items())),
        },
    }
    return json.dumps(data, indent=2) + "\n"


def replacement_from_json(text: str) -> ReplacementGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("kind") != "replacement":
        raise GraphError('replacement JSON must have "kind": "replacement"')
    for key in ("graph", "host", "connectors", "copies", "roles"):
        if key not in data:
            raise GraphError(f"replacement JSON missing field {key!r}")
    g = parse(json.dumps(data["graph"]))
    host = parse(json.dumps(data["host"]))
    if not isinstance(g, Graph) or not isinstance(host, Digraph):
        raise GraphError("replacement JSON needs an undirected graph and a digraph host")
    connectors = tuple(data["connectors"])
    if set(connectors) != set(host.vertices):
        raise GraphError("connectors must be exactly the host vertices")
    vset = set(g.vertices)
    copies: dict[tuple[str, str], CopyRecord] = {}
    for entry in data["copies"]:
        arc = tuple(entry["arc"])
        if len(arc) != 2 or not host.has_arc(*arc):
            raise GraphError(f"copy arc {arc!r} is not a host arc")
        names = dict(entry["names"])
        missing = sorted(set(names.values()) - vset)
        if missing:
            raise GraphError(f"copy names refer to unknown vertex {missing[0]!r}")
        copies[arc] = CopyRecord(arc, names)
    roles = RoleMap(dict(data["roles"]["role"]), dict(data["roles"]["owner"]))
    return ReplacementGraph(g, host, connectors, copies, roles)
