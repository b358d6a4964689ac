import random

import pytest

from qhorder import (
    GraphError,
    check_witness,
    compose,
    dicycles,
    dicycles_hom,
    dicycles_to_digraph,
    digraph,
    directed_cycle,
    find_hom,
    graph,
    induced,
    weak_components,
)


def test_cycle_hom_divisible():
    wit = find_hom(directed_cycle(6), directed_cycle(3))
    assert wit == {f"c{i}": f"c{i % 3}" for i in range(6)}
    ok, violation = check_witness(directed_cycle(6), directed_cycle(3), wit)
    assert ok and violation is None


def test_cycle_hom_indivisible():
    assert find_hom(directed_cycle(4), directed_cycle(3)) is None


def test_identity_witness():
    c3 = directed_cycle(3)
    assert find_hom(c3, c3) == {v: v for v in c3.vertices}
    k3 = graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    wit = find_hom(k3, k3)
    assert check_witness(k3, k3, wit)[0]


def test_check_witness_first_violation():
    c6, c3 = directed_cycle(6), directed_cycle(3)
    constant = {v: "c0" for v in c6.vertices}
    ok, violation = check_witness(c6, c3, constant)
    assert not ok
    assert violation == (("c0", "c1"), ("c0", "c0"))


def test_check_witness_vacuous_and_errors():
    empty = digraph((), ())
    assert check_witness(empty, directed_cycle(2), {}) == (True, None)
    with pytest.raises(GraphError, match="total"):
        check_witness(directed_cycle(2), directed_cycle(2), {"c0": "c0"})
    with pytest.raises(GraphError, match="target"):
        check_witness(directed_cycle(2), directed_cycle(2), {"c0": "zz", "c1": "c0"})
    with pytest.raises(GraphError, match="kind"):
        check_witness(directed_cycle(2), graph("ab", [("a", "b")]), {})


def test_kind_mismatch():
    with pytest.raises(GraphError, match="kind"):
        find_hom(directed_cycle(2), graph("ab", [("a", "b")]))


def test_empty_conventions():
    empty_d = digraph((), ())
    assert find_hom(empty_d, directed_cycle(3)) == {}
    assert find_hom(empty_d, empty_d) == {}
    assert find_hom(directed_cycle(3), empty_d) is None


def test_composition_transitive():
    c12, c6, c3 = directed_cycle(12), directed_cycle(6), directed_cycle(3)
    f = find_hom(c12, c6)
    g = find_hom(c6, c3)
    gf = compose(f, g)
    assert check_witness(c12, c3, gf)[0]


def test_determinism():
    c9, c3 = directed_cycle(9), directed_cycle(3)
    assert find_hom(c9, c3) == find_hom(c9, c3)


def test_dicycles_hom_examples():
    assert dicycles_hom(dicycles([6, 10]), dicycles([2, 3]))
    assert not dicycles_hom(dicycles([4]), dicycles([3]))
    for n in range(2, 9):
        assert dicycles_hom(dicycles([n]), dicycles([n]))
    assert dicycles_hom(dicycles([]), dicycles([]))
    with pytest.raises(GraphError):
        dicycles_hom(dicycles([3]), dicycles([]))


def test_dicycles_hom_agrees_with_search():
    rng = random.Random(5)
    for _ in range(40):
        d = dicycles([rng.randint(2, 8) for _ in range(rng.randint(1, 2))])
        d2 = dicycles([rng.randint(2, 8) for _ in range(rng.randint(1, 2))])
        expected = dicycles_hom(d, d2)
        wit = find_hom(dicycles_to_digraph(d), dicycles_to_digraph(d2))
        assert (wit is not None) == expected
        if wit is not None:
            assert check_witness(dicycles_to_digraph(d), dicycles_to_digraph(d2), wit)[0]


def test_component_reduction():
    # connected source into a disjoint union: solvable iff solvable into some part
    targets = dicycles_to_digraph(dicycles([3, 5]))
    for n in (4, 6, 7, 10, 15):
        source = directed_cycle(n)
        whole = find_hom(source, targets) is not None
        parts = [
            find_hom(source, induced(targets, comp)) is not None
            for comp in weak_components(targets)
        ]
        assert whole == any(parts)


def test_domain_restriction():
    c6, c3 = directed_cycle(6), directed_cycle(3)
    wit = find_hom(c6, c3, domains={"c0": {"c1"}})
    assert wit is not None and wit["c0"] == "c1"
    assert find_hom(c3, c3, domains={"c0": set()}) is None
