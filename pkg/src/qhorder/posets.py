"""Finite posets realized inside graph homomorphism orders via cycle lengths.

Each element gets a distinct prime; its cycle length is the product of the
primes over its up-set, so divisibility of lengths reverses up-set inclusion
and the divisibility order on the resulting squarefree lengths reproduces the
poset exactly.  At the directed level the order is checked three ways
(arithmetic oracle, complete search, pruning verdicts); at the undirected
level comparable pairs get lifted witnesses over the replacement graphs and
incomparable pairs get zero-forcing certificates reduced back to cycle level.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .gadgets import (
    Indicator,
    ReplacementGraph,
    build_indicator,
    endpoint_certificate,
    replace,
)
from .graphs import DiCycles, Digraph, GraphError, dicycles, dicycles_to_digraph, digraph
from .homsolver import check_witness, dicycles_hom, find_hom
from .prune import INFEASIBLE, UNKNOWN, ZeroLedger, prune_closure

__all__ = [
    "PRIMES",
    "PosetError",
    "Poset",
    "poset",
    "Embedding",
    "encode",
    "OrderCheckReport",
    "order_check_D",
    "phi",
    "construct_phi_hom",
    "PhiReduction",
    "reduce_phi_to_D",
    "EmbeddingReport",
    "verify_embedding",
]

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)

MAX_ELEMENTS = 8
DEFAULT_PHI_VERTEX_BUDGET = 100_000
PHI_BUDGET_ENV = "QHORDER_MAX_VERTICES"


class PosetError(ValueError):
    """Invalid poset data or an encoding outside the configured limits."""


@dataclass(frozen=True)
class Poset:
    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    def le(self, x: str, y: str) -> bool:
        return (x, y) in self.leq

    def up_set(self, x: str) -> tuple[str, ...]:
        return tuple(z for z in self.elements if self.le(x, z))


def poset(elements: Iterable[str], leq: Iterable[Sequence[str]]) -> Poset:
    """Validate a finite partial order; the reflexive closure is added automatically.

    Transitivity is validated, not completed: a missing composite pair is an error.
    """
    els = tuple(elements)
    if len(set(els)) != len(els):
        raise PosetError("duplicate element")
    eset = set(els)
    rel: set[tuple[str, str]] = {(x, x) for x in els}
    for pair in leq:
        x, y = pair
        if x not in eset or y not in eset:
            raise PosetError(f"relation mentions unknown element {(x, y)!r}")
        rel.add((x, y))
    for x, y in sorted(rel):
        if x != y and (y, x) in rel:
            raise PosetError(f"antisymmetry violated by {x!r} and {y!r}")
    for x, y in sorted(rel):
        for z in els:
            if (y, z) in rel and (x, z) not in rel:
                raise PosetError(f"transitivity violated: {x!r} <= {y!r} <= {z!r} but not {x!r} <= {z!r}")
    return Poset(els, frozenset(rel))


@dataclass(frozen=True)
class Embedding:
    """Element -> distinct prime; length = product of primes over the up-set."""

    poset: Poset
    primes: dict[str, int]
    lengths: dict[str, int]
    cycles: dict[str, DiCycles]


def encode(p: Poset, *, max_elements: int = MAX_ELEMENTS, seed: int | None = None) -> Embedding:
    """Assign primes (ascending in element order, or shuffled with an explicit seed)."""
    if len(p.elements) > max_elements:
        raise PosetError(f"poset has {len(p.elements)} elements; maximum is {max_elements}")
    assigned = list(PRIMES[: len(p.elements)])
    if seed is not None:
        random.Random(seed).shuffle(assigned)
    primes = dict(zip(p.elements, assigned))
    lengths = {x: math.prod(primes[z] for z in p.up_set(x)) for x in p.elements}
    cycles = {x: dicycles([lengths[x]]) for x in p.elements}
    for x in p.elements:
        for y in p.elements:
            if (lengths[x] % lengths[y] == 0) != p.le(x, y):
                raise PosetError(f"encoding failed to reverse up-set inclusion at ({x!r}, {y!r})")
    return Embedding(p, primes, lengths, cycles)


@dataclass
class PairCheck:
    x: str
    y: str
    expected: bool
    divides: bool
    oracle: bool
    solver: bool
    prune_verdict: str

    @property
    def consistent(self) -> bool:
        return (
            self.divides == self.expected
            and self.oracle == self.expected
            and self.solver == self.expected
            and (self.prune_verdict == INFEASIBLE) == (not self.expected)
        )


@dataclass
class OrderCheckReport:
    rows: list[PairCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.consistent for r in self.rows)


def order_check_D(p: Poset, emb: Embedding) -> OrderCheckReport:
    """Check every ordered pair at the directed-cycle level through all three routes."""
    graphs = {x: dicycles_to_digraph(emb.cycles[x]) for x in p.elements}
    report = OrderCheckReport()
    for x in p.elements:
        for y in p.elements:
            expected = p.le(x, y)
            divides = emb.lengths[x] % emb.lengths[y] == 0
            oracle = dicycles_hom(emb.cycles[x], emb.cycles[y])
            witness = find_hom(graphs[x], graphs[y])
            if witness is not None:
                ok, violation = check_witness(graphs[x], graphs[y], witness)
                if not ok:
                    raise GraphError(f"solver returned an invalid witness: {violation}")
            ledger = prune_closure(graphs[x], graphs[y])
            report.rows.append(
                PairCheck(x, y, expected, divides, oracle, witness is not None, ledger.verdict)
            )
    return report


def _phi_budget(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    raw = os.environ.get(PHI_BUDGET_ENV, "")
    return int(raw) if raw.strip() else DEFAULT_PHI_VERTEX_BUDGET


def phi(
    emb: Embedding,
    x: str,
    *,
    indicator: Indicator | None = None,
    max_vertices: int | None = None,
) -> ReplacementGraph:
    """Replacement graph of the element's cycle; refused above the vertex budget."""
    ind = indicator if indicator is not None else build_indicator()
    host = dicycles_to_digraph(emb.cycles[x])
    per_arc = len(ind.graph.vertices) - 2
    need = len(host.vertices) + len(host.arcs) * per_arc
    budget = _phi_budget(max_vertices)
    if need > budget:
        raise PosetError(f"replacement graph needs {need} vertices, over the budget {budget}")
    return replace(host, ind)


def construct_phi_hom(
    f_d: Mapping[str, str], phi_src: ReplacementGraph, phi_dst: ReplacementGraph
) -> dict[str, str]:
    """Lift a host-level witness: connectors follow it, copies map identically onto copies."""
    ok, violation = check_witness(phi_src.host, phi_dst.host, f_d)
    if not ok:
        raise GraphError(f"base witness is not a homomorphism: violation at {violation}")
    out: dict[str, str] = {u: f_d[u] for u in phi_src.connectors}
    for (u, v), rec in phi_src.copies.items():
        target = phi_dst.copies[(f_d[u], f_d[v])]
        for jv, name in rec.names.items():
            out[name] = target.names[jv]
    return out


@dataclass
class PhiReduction:
    """Replacement-level verdict derived from the host-level problem."""

    verdict: str
    certificate: frozenset[tuple[str, str]]
    connector_pairs_checked: int
    d_source: Digraph
    d_target: Digraph
    d_ledger: ZeroLedger


def reduce_phi_to_D(ledger: ZeroLedger) -> PhiReduction:
    """Reduce a replacement-level ledger to the host-level problem it shadows.

    Requires a ledger produced with the color rule over two replacement
    graphs whose source connectors all have outgoing arcs.  Connector images
    are then confined to connectors (checked against the ledger), arcs of the
    target certificate bound consecutive connector images, and pruning the
    derived host-level problem settles the replacement-level verdict.
    """
    src = ledger.config.source_obj
    tgt = ledger.config.target_obj
    if not isinstance(src, ReplacementGraph) or not isinstance(tgt, ReplacementGraph):
        raise GraphError("reduction needs replacement metadata on both sides")
    if "color" not in ledger.config.rules:
        raise GraphError("reduction needs a ledger produced with the color rule enabled")
    host = src.host
    tails = {u for u, _ in host.arcs}
    stranded = sorted(set(host.vertices) - tails)
    if stranded:
        raise GraphError(f"connector {stranded[0]!r} has no outgoing arc")
    non_connectors = [p for p in tgt.graph.vertices if p not in set(tgt.connectors)]
    checked = 0
    for u in src.connectors:
        for pv in non_connectors:
            if not ledger.is_zero(u, pv):
                raise GraphError(f"connector localization missing for ({u!r}, {pv!r})")
            checked += 1
    certificate = endpoint_certificate(tgt)
    d_target = digraph(tgt.connectors, sorted(certificate))
    assume = [
        (u, v) for u in src.connectors for v in tgt.connectors if ledger.is_zero(u, v)
    ]
    d_ledger = prune_closure(host, d_target, assume_zero=assume)
    return PhiReduction(
        d_ledger.verdict, frozenset(certificate), checked, host, d_target, d_ledger
    )


@dataclass
class EmbeddingPair:
    x: str
    y: str
    comparable: bool
    mode: str  # "witness" | "infeasible"
    ok: bool
    detail: dict


@dataclass
class EmbeddingReport:
    rows: list[EmbeddingPair] = field(default_factory=list)

    @property
    def realized(self) -> bool:
        return all(r.ok for r in self.rows)


def verify_embedding(
    p: Poset,
    *,
    emb: Embedding | None = None,
    indicator: Indicator | None = None,
    max_vertices: int | None = None,
    phis: Mapping[str, ReplacementGraph] | None = None,
) -> EmbeddingReport:
    """Realize the poset at replacement level: witnesses for comparable pairs,
    zero-forcing certificates for incomparable ones."""
    emb = emb if emb is not None else encode(p)
    ind = indicator if indicator is not None else build_indicator()
    if phis is None:
        phis = {x: phi(emb, x, indicator=ind, max_vertices=max_vertices) for x in p.elements}
    report = EmbeddingReport()
    for x in p.elements:
        for y in p.elements:
            if p.le(x, y):
                f_d = find_hom(phis[x].host, phis[y].host)
                if f_d is None:
                    report.rows.append(
                        EmbeddingPair(x, y, True, "witness", False, {"error": "no base witness"})
                    )
                    continue
                lifted = construct_phi_hom(f_d, phis[x], phis[y])
                ok, violation = check_witness(phis[x].graph, phis[y].graph, lifted)
                report.rows.append(
                    EmbeddingPair(
                        x, y, True, "witness", ok,
                        {"witness_size": len(lifted), "violation": violation},
                    )
                )
            else:
                ledger = prune_closure(phis[x], phis[y], rules=("color",))
                reduction = reduce_phi_to_D(ledger)
                ok = reduction.verdict == INFEASIBLE and len(reduction.d_ledger.trace) > 0
                report.rows.append(
                    EmbeddingPair(
                        x, y, False, "infeasible", ok,
                        {
                            "phi_zero_pairs": ledger.zero_count,
                            "d_trace_length": len(reduction.d_ledger.trace),
                        },
                    )
                )
    return report
