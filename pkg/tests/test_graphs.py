import json
import random

import pytest

from qhorder import (
    GraphError,
    ParseError,
    dicycles,
    dicycles_to_digraph,
    digraph,
    directed_cycle,
    disjoint_union,
    graph,
    induced,
    parse,
    serialize,
    to_dot,
    weak_components,
)
from qhorder.walks import walk_table


def test_directed_cycle_3():
    g = directed_cycle(3)
    assert g.vertices == ("c0", "c1", "c2")
    assert g.arcs == frozenset({("c0", "c1"), ("c1", "c2"), ("c2", "c0")})


def test_directed_cycle_2():
    g = directed_cycle(2)
    assert g.arcs == frozenset({("c0", "c1"), ("c1", "c0")})


def test_directed_cycle_rejects_small():
    with pytest.raises(GraphError, match="loop"):
        directed_cycle(1)
    with pytest.raises(GraphError):
        directed_cycle(0)
    with pytest.raises(GraphError):
        directed_cycle(-3)
    with pytest.raises(GraphError):
        directed_cycle("3")


def test_constructor_validation():
    with pytest.raises(GraphError, match="loop"):
        graph(["a"], [("a", "a")])
    with pytest.raises(GraphError, match="duplicate edge"):
        graph(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(GraphError, match="unknown endpoint"):
        digraph(["a"], [("a", "b")])
    with pytest.raises(GraphError, match="duplicate vertex"):
        graph(["a", "a"])
    with pytest.raises(GraphError, match="duplicate arc"):
        digraph(["a", "b"], [("a", "b"), ("a", "b")])
    # opposite arcs are distinct, not parallel
    assert digraph(["a", "b"], [("a", "b"), ("b", "a")]).n_arcs == 2


def test_dicycles_validation():
    assert dicycles([3, 2]).lengths == (2, 3)
    with pytest.raises(GraphError):
        dicycles([1])
    with pytest.raises(GraphError):
        dicycles([2.5])


def test_dicycles_to_digraph_singleton():
    g = dicycles_to_digraph(dicycles([3]))
    assert g.n_vertices == 3
    assert g.arcs == frozenset({("p0.c0", "p0.c1"), ("p0.c1", "p0.c2"), ("p0.c2", "p0.c0")})


def test_dicycles_to_digraph_union_counts():
    g = dicycles_to_digraph(dicycles([2, 3]))
    assert g.n_vertices == 5
    assert g.n_arcs == 5
    assert len(weak_components(g)) == 2


def test_dicycles_to_digraph_empty():
    g = dicycles_to_digraph(dicycles([]))
    assert g.n_vertices == 0
    assert g.directed


def test_disjoint_union_counts():
    k2 = graph(["a", "b"], [("a", "b")])
    u = disjoint_union([k2, k2])
    assert u.n_vertices == 4
    assert u.n_edges == 2


def test_disjoint_union_empty_and_mixed():
    assert disjoint_union([]).n_vertices == 0
    with pytest.raises(GraphError, match="union"):
        disjoint_union([graph(["a"]), digraph(["b"])])


def _cycle_lengths(g):
    """Component cycle-length multiset; asserts each component is a directed cycle."""
    out = []
    for comp in weak_components(g):
        sub = induced(g, comp)
        for v in sub.vertices:
            assert len(sub.out_neighbors(v)) == 1
            assert len(sub.in_neighbors(v)) == 1
        out.append(len(comp))
    return sorted(out)


def test_union_of_cycles_matches_dicycles():
    u = disjoint_union([directed_cycle(3), directed_cycle(2)])
    d = dicycles_to_digraph(dicycles([3, 2]))
    assert _cycle_lengths(u) == _cycle_lengths(d) == [2, 3]


def _canon(g):
    """Relabel by sorted-identifier index; equal results mean equal up to renaming."""
    order = {v: f"v{i:04d}" for i, v in enumerate(sorted(g.vertices))}
    pairs = g.sorted_arcs() if g.directed else g.sorted_edges()
    return (g.directed, len(g.vertices), sorted((order[u], order[v]) for u, v in pairs))


def test_disjoint_union_associative():
    rng = random.Random(7)
    for _ in range(20):
        parts = []
        for _ in range(3):
            n = rng.randint(1, 5)
            vs = [f"n{i}" for i in range(n)]
            es = {(vs[rng.randrange(n)], vs[rng.randrange(n)]) for _ in range(n)}
            es = [(u, v) for u, v in es if u != v]
            parts.append(digraph(vs, {(u, v) for u, v in es}))
        a, b, c = parts
        left = disjoint_union([disjoint_union([a, b]), c])
        right = disjoint_union([a, disjoint_union([b, c])])
        assert _canon(left) == _canon(right)


def test_weak_components():
    assert weak_components(dicycles_to_digraph(dicycles([2, 3]))) == [
        ("p0.c0", "p0.c1"),
        ("p1.c0", "p1.c1", "p1.c2"),
    ]
    assert len(weak_components(directed_cycle(5))) == 1
    assert weak_components(digraph((), ())) == []


def test_serialize_roundtrip_cycle():
    g = directed_cycle(2)
    assert parse(serialize(g)) == g


def test_serialize_sorted_edge_endpoints():
    g = graph(["b", "a"], [("b", "a")], labels={"a": {"k": "v"}})
    data = json.loads(serialize(g))
    assert data["edges"] == [["a", "b"]]
    assert data["vertices"] == ["b", "a"]
    assert parse(serialize(g)) == g


def _random_graph(rng, directed):
    n = rng.randint(0, 8)
    vs = [f"v{i}" for i in range(n)]
    pairs = set()
    for _ in range(n * 2):
        if n < 2:
            break
        u, v = rng.sample(vs, 2)
        pairs.add((u, v) if directed else ((u, v) if u < v else (v, u)))
    labels = {v: {"tag": str(rng.randrange(3))} for v in vs if rng.random() < 0.3}
    return digraph(vs, pairs, labels) if directed else graph(vs, pairs, labels)


def test_roundtrip_random():
    rng = random.Random(11)
    for _ in range(100):
        g = _random_graph(rng, rng.random() < 0.5)
        assert parse(serialize(g)) == g


@pytest.mark.parametrize(
    "payload, where, reason",
    [
        ('{"kind":"graph","vertices":["v"],"edges":[["v","v"]]}', "edges[0]", "loop"),
        (
            '{"kind":"graph","vertices":["a","b"],"edges":[["a","b"],["b","a"]]}',
            "edges[1]",
            "duplicate",
        ),
        ('{"kind":"digraph","vertices":["a"],"edges":[["a","b"]]}', "edges[0]", "unknown endpoint"),
        ('{"kind":"tree","vertices":[]}', "kind", "expected"),
        ('{"kind":"graph","vertices":["a","a"]}', "vertices[1]", "duplicate"),
        ('{"kind":"graph","vertices":[],"extra":1}', "extra", "unexpected"),
        ('{"kind":"graph","vertices":["a"],"labels":{"b":{}}}', "labels['b']", "unknown vertex"),
        ("not json", "$", "invalid JSON"),
    ],
)
def test_parse_errors(payload, where, reason):
    with pytest.raises(ParseError) as err:
        parse(payload)
    assert err.value.where == where
    assert reason in err.value.reason


def test_dot_export():
    g = directed_cycle(2)
    dot = to_dot(g)
    assert dot.startswith("digraph")
    assert '"c0" -> "c1";' in dot
    u = graph(["a", "b"], [("a", "b")], labels={"a": {"role": "E"}})
    dot_u = to_dot(u)
    assert '"a" -- "b";' in dot_u
    assert 'role="E"' in dot_u


def test_induced_subgraph():
    g = directed_cycle(4)
    sub = induced(g, ["c0", "c1"])
    assert sub.arcs == frozenset({("c0", "c1")})
    with pytest.raises(GraphError, match="unknown vertex"):
        induced(g, ["zz"])


def test_cycle_closed_walk_classes():
    # every vertex of a directed n-cycle closes walks at exactly the multiples of n
    for n in range(2, 13):
        table = walk_table(directed_cycle(n), 60)
        for v in table.vertices:
            assert table.lengths(v, v) == tuple(range(0, 61, n))
