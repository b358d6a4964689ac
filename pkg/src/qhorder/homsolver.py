"""Complete backtracking search for classical graph and digraph homomorphisms.

The search runs arc-consistency preprocessing, then backtracking with a
smallest-remaining-domain variable order and forward checking.  Value order is
always sorted target identifiers, so results are deterministic.  A returned
mapping is always a valid witness; None is a proof of nonexistence.
"""

from __future__ import annotations

from collections import deque
from typing import Mapping

from .graphs import DiCycles, Digraph, Graph, GraphError

__all__ = ["find_hom", "check_witness", "compose", "dicycles_hom"]


def _constraints(x: Graph | Digraph) -> list[tuple[str, str]]:
    """Ordered constraint pairs (u, v): f(u) must reach f(v) one step forward."""
    if x.directed:
        return x.sorted_arcs()
    return x.sorted_edges()


def _adj_maps(y: Graph | Digraph):
    if y.directed:
        fwd = {v: set(y.out_neighbors(v)) for v in y.vertices}
        bwd = {v: set(y.in_neighbors(v)) for v in y.vertices}
    else:
        fwd = {v: set(y.neighbors(v)) for v in y.vertices}
        bwd = fwd
    return fwd, bwd


def find_hom(
    x: Graph | Digraph,
    y: Graph | Digraph,
    *,
    domains: Mapping[str, set[str]] | None = None,
) -> dict[str, str] | None:
    """Find a homomorphism x -> y, or prove there is none.

    ``domains`` optionally restricts candidate images per source vertex (the
    caller is responsible for only removing images that cannot occur; the color
    classification of gadget graphs is one sound such filter).
    """
    if x.kind != y.kind:
        raise GraphError(f"kind mismatch: {x.kind} vs {y.kind}")
    if not x.vertices:
        return {}
    if not y.vertices:
        return None

    targets = sorted(y.vertices)
    yset = set(targets)
    dom: dict[str, list[str]] = {}
    for v in x.vertices:
        if domains is not None and v in domains:
            dom[v] = sorted(set(domains[v]) & yset)
        else:
            dom[v] = list(targets)
        if not dom[v]:
            return None

    fwd, bwd = _adj_maps(y)
    cons = _constraints(x)
    # neighbor lists: (other, True) means constraint (v, other), i.e. f(other) in fwd(f(v))
    nbr: dict[str, list[tuple[str, bool]]] = {v: [] for v in x.vertices}
    for u, v in cons:
        nbr[u].append((v, True))
        nbr[v].append((u, False))

    def compatible(val: str, forward: bool) -> set[str]:
        return fwd[val] if forward else bwd[val]

    # AC-3 preprocessing
    queue = deque((u, v, forward) for u in sorted(nbr) for (v, forward) in nbr[u])
    while queue:
        a, b, forward = queue.popleft()
        db = dom[b]
        keep = [val for val in dom[a] if any(w in compatible(val, forward) for w in db)]
        if len(keep) != len(dom[a]):
            if not keep:
                return None
            dom[a] = keep
            for c, fw in nbr[a]:
                queue.append((c, a, not fw))

    assignment: dict[str, str] = {}

    def search() -> bool:
        if len(assignment) == len(x.vertices):
            return True
        var = min((v for v in x.vertices if v not in assignment), key=lambda v: (len(dom[v]), v))
        saved = {var: dom[var]}
        for val in dom[var]:
            assignment[var] = val
            ok = True
            trimmed: dict[str, list[str]] = {}
            for other, forward in nbr[var]:
                if other in assignment:
                    if assignment[other] not in compatible(val, forward):
                        ok = False
                        break
                    continue
                allowed = compatible(val, forward)
                newdom = [w for w in dom[other] if w in allowed]
                if len(newdom) != len(dom[other]):
                    trimmed.setdefault(other, dom[other])
                    dom[other] = newdom
                    if not newdom:
                        ok = False
                        break
            if ok and search():
                return True
            for other, old in trimmed.items():
                dom[other] = old
            del assignment[var]
        dom[var] = saved[var]
        return False

    if search():
        return dict(assignment)
    return None


def check_witness(
    x: Graph | Digraph, y: Graph | Digraph, mapping: Mapping[str, str]
) -> tuple[bool, tuple[tuple[str, str], tuple[str, str]] | None]:
    """Validate a witness; on failure return the first violating pair in sorted order."""
    if x.kind != y.kind:
        raise GraphError(f"kind mismatch: {x.kind} vs {y.kind}")
    if set(mapping) != set(x.vertices):
        raise GraphError("mapping must be total on the source vertex set")
    yset = set(y.vertices)
    for v in x.vertices:
        if mapping[v] not in yset:
            raise GraphError(f"image {mapping[v]!r} of {v!r} is not a target vertex")
    if x.directed:
        for u, v in x.sorted_arcs():
            if not y.has_arc(mapping[u], mapping[v]):
                return False, ((u, v), (mapping[u], mapping[v]))
    else:
        for u, v in x.sorted_edges():
            if not y.has_edge(mapping[u], mapping[v]):
                return False, ((u, v), (mapping[u], mapping[v]))
    return True, None


def compose(f: Mapping[str, str], g: Mapping[str, str]) -> dict[str, str]:
    """Pointwise composition g . f; every image of f must be in g's domain."""
    out = {}
    for v, w in f.items():
        if w not in g:
            raise GraphError(f"image {w!r} missing from the second mapping")
        out[v] = g[w]
    return out


def dicycles_hom(d: DiCycles, d2: DiCycles) -> bool:
    """Divisibility oracle: every length in d must have a divisor in d2."""
    if d.lengths and not d2.lengths:
        raise GraphError("target cycle multiset may be empty only if the source is empty")
    return all(any(n % m == 0 for m in d2.lengths) for n in d.lengths)
