"""Zero-forcing engine: sound necessary conditions for quantum homomorphisms.

A quantum homomorphism from X to Y is a family of projections E[x, y] with
completeness (for each x the E[x, .] sum to the identity), same-vertex
orthogonality, and the edge-zero relation (adjacent sources cannot land on
non-adjacent targets).  The projections are never represented numerically;
this module only accumulates pairs (x, y) for which E[x, y] = 0 is forced,
propagates consequences to a fixed point, and reports Infeasible exactly when
some source vertex has every target ruled out, which contradicts
completeness.  The verdict vocabulary is strictly {Infeasible, Unknown}:
these rules never establish feasibility.

Shipped rules (the registry below is the extension point):

* closed-walk: a closed walk length at x missing at y kills (x, y).
* pair-walk:   a walk length from x to x2 missing from y to y2 kills the
               product E[x, y] E[x2, y2]; a pair all of whose partners at
               some x2 are killed or already zero is itself zero.
* support:     (x, y) dies when some neighbor x2 of x has every admissible
               image next to y already zeroed.
* color:       gadget roots can only land on same-color roots of a
               replacement target.

Every derivation is recorded in an auditable trace that check_trace replays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .gadgets import Indicator, ReplacementGraph, RoleMap, color_sets
from .graphs import Digraph, Graph, GraphError, induced, weak_components
from .walks import closed_walk_masks, lowest_bit, packed_pair_table, pair_walk_masks

__all__ = [
    "INFEASIBLE",
    "UNKNOWN",
    "BOUND_CAP",
    "DEFAULT_RULES",
    "RULE_REGISTRY",
    "TraceEntry",
    "PruneConfig",
    "ZeroLedger",
    "TraceError",
    "default_bound",
    "rule_closed_walk",
    "rule_pair_walk",
    "rule_support",
    "rule_color_localization",
    "prune_closure",
    "check_trace",
]

INFEASIBLE = "Infeasible"
UNKNOWN = "Unknown"

BOUND_CAP = 4096
DEFAULT_RULES = ("closed-walk", "support", "pair-walk")

RULE_REGISTRY = {
    "closed-walk": "closed-walk lengths of x must all exist at y",
    "support": "a neighbor of x with no surviving image next to y kills (x, y)",
    "pair-walk": "walk lengths between source pairs must exist between image pairs",
    "color": "gadget roots only land on same-color roots of a replacement target",
}


class TraceError(GraphError):
    """A trace entry could not be justified during replay."""


class TraceEntry(NamedTuple):
    x: str
    y: str
    rule: str
    detail: tuple


@dataclass(frozen=True)
class PruneConfig:
    bound: int
    rules: tuple[str, ...]
    pair_requests: tuple[tuple[str, str], ...] = ()
    source_roles: RoleMap | None = None
    source_obj: object | None = None
    target_obj: object | None = None


class ZeroLedger:
    """Monotone record of proven-zero pairs with verdict and replayable trace."""

    def __init__(self, source: Graph | Digraph, target: Graph | Digraph, config: PruneConfig):
        self.source = source
        self.target = target
        self.config = config
        self._zero: dict[str, set[str]] = {x: set() for x in source.vertices}
        self.trace: list[TraceEntry] = []

    def is_zero(self, x: str, y: str) -> bool:
        return y in self._zero[x]

    def add(self, x: str, y: str, rule: str, detail: tuple = ()) -> bool:
        row = self._zero[x]
        if y in row:
            return False
        row.add(y)
        self.trace.append(TraceEntry(x, y, rule, detail))
        return True

    def zero_pairs(self) -> set[tuple[str, str]]:
        return {(x, y) for x, row in self._zero.items() for y in row}

    @property
    def zero_count(self) -> int:
        return sum(len(row) for row in self._zero.values())

    def alive(self, x: str) -> list[str]:
        row = self._zero[x]
        return [y for y in sorted(self.target.vertices) if y not in row]

    def row_dead(self, x: str) -> bool:
        return len(self._zero[x]) == len(self.target.vertices)

    @property
    def verdict(self) -> str:
        if self.source.vertices and not self.target.vertices:
            return INFEASIBLE
        return INFEASIBLE if any(self.row_dead(x) for x in self.source.vertices) else UNKNOWN


def default_bound(source: Graph | Digraph, target: Graph | Digraph) -> int:
    return min(len(source.vertices) * len(target.vertices), BOUND_CAP)


def _as_plain(obj):
    """Accept Graph/Digraph/Indicator/ReplacementGraph; return (graph, roles, original)."""
    if isinstance(obj, (Graph, Digraph)):
        return obj, None, obj
    if isinstance(obj, Indicator):
        return obj.graph, obj.roles, obj
    if isinstance(obj, ReplacementGraph):
        return obj.graph, obj.roles, obj
    raise GraphError(f"expected a graph, digraph, indicator or replacement graph, got {type(obj).__name__}")


def rule_closed_walk(x: Graph | Digraph, y: Graph | Digraph, bound: int) -> dict[tuple[str, str], int]:
    """Pairs killed by a closed-walk length mismatch, mapped to the smallest witness length."""
    if x.kind != y.kind:
        raise GraphError(f"kind mismatch: {x.kind} vs {y.kind}")
    cw_x = closed_walk_masks(x, bound)
    cw_y = closed_walk_masks(y, bound)
    out: dict[tuple[str, str], int] = {}
    for xv in x.vertices:
        mask_x = cw_x[xv]
        for yv in y.vertices:
            diff = mask_x & ~cw_y[yv]
            if diff:
                out[(xv, yv)] = lowest_bit(diff)
    return out


def rule_pair_walk(
    x: Graph | Digraph,
    y: Graph | Digraph,
    bound: int,
    pairs: Iterable[tuple[tuple[str, str], tuple[str, str]]],
) -> dict[tuple[tuple[str, str], tuple[str, str]], int]:
    """Flag requested products E[x,y]E[x2,y2] = 0, mapped to the smallest witness length."""
    if x.kind != y.kind:
        raise GraphError(f"kind mismatch: {x.kind} vs {y.kind}")
    pairs = list(pairs)
    src = pair_walk_masks(x, bound, sorted({(p[0][0], p[1][0]) for p in pairs}))
    tgt = pair_walk_masks(y, bound, sorted({(p[0][1], p[1][1]) for p in pairs}))
    out: dict[tuple[tuple[str, str], tuple[str, str]], int] = {}
    for (xv, yv), (x2, y2) in pairs:
        diff = src[(xv, x2)] & ~tgt[(yv, y2)]
        if diff:
            out[((xv, yv), (x2, y2))] = lowest_bit(diff)
    return out


def _support_neighbors(x: Graph | Digraph, v: str) -> list[tuple[str, str]]:
    """Constraint neighbors of v as (direction, x2): "out" means v->x2, "in" x2->v."""
    if x.directed:
        return [("out", w) for w in x.out_neighbors(v)] + [("in", w) for w in x.in_neighbors(v)]
    return [("und", w) for w in x.neighbors(v)]


def _directed_targets(y: Graph | Digraph, yv: str, direction: str) -> tuple[str, ...]:
    if direction == "out":
        return y.out_neighbors(yv)
    if direction == "in":
        return y.in_neighbors(yv)
    return y.neighbors(yv)


def rule_support(x: Graph | Digraph, y: Graph | Digraph, ledger: ZeroLedger) -> list[tuple[str, str, tuple]]:
    """One propagation pass: new (x, y, (direction, x2)) facts given the current zero set.

    (x, y) dies when some constraint neighbor x2 of x has every image adjacent
    to y (in the matching direction) already zeroed: expanding E[x, y] against
    the measurement at x2 leaves no nonzero summand.
    """
    additions: list[tuple[str, str, tuple]] = []
    for xv in x.vertices:
        nbrs = _support_neighbors(x, xv)
        if not nbrs:
            continue
        row = ledger._zero[xv]
        for yv in y.vertices:
            if yv in row:
                continue
            for direction, x2 in nbrs:
                if all(ledger.is_zero(x2, y2) for y2 in _directed_targets(y, yv, direction)):
                    additions.append((xv, yv, (direction, x2)))
                    break
    return additions


def rule_color_localization(
    x: Graph | Digraph, y: ReplacementGraph, roles: RoleMap
) -> dict[tuple[str, str], str]:
    """Zero (x, y) whenever x carries a color gadget and y is not a same-color root."""
    if not isinstance(y, ReplacementGraph):
        raise GraphError("color rule needs a replacement target with metadata")
    a_set, b_set, e_set = color_sets(y)
    sets = {"A": a_set, "B": b_set, "E": e_set}
    xset = set(x.vertices)
    out: dict[tuple[str, str], str] = {}
    for xv in sorted(roles.role):
        if xv not in xset:
            continue
        letter = roles.role[xv]
        allowed = sets[letter]
        for yv in y.graph.vertices:
            if yv not in allowed:
                out[(xv, yv)] = letter
    return out


def _distance_pairs(g: Graph | Digraph, max_dist: int = 2) -> list[tuple[str, str]]:
    """Ordered pairs (v, w) with a directed path of length <= max_dist from v to w."""
    pairs: set[tuple[str, str]] = set()
    for v in g.vertices:
        frontier = {v}
        seen = {v}
        pairs.add((v, v))
        for _ in range(max_dist):
            nxt: set[str] = set()
            for u in frontier:
                nxt |= set(g.out_neighbors(u) if g.directed else g.neighbors(u))
            for w in nxt:
                pairs.add((v, w))
            frontier = nxt - seen
            seen |= nxt
    return sorted(pairs)


class _PairWalkState:
    """Per-branch tables for the pair-walk rule, shared across fixed-point passes."""

    def __init__(
        self,
        xg: Graph | Digraph,
        yg: Graph | Digraph,
        bound: int,
        requests: Sequence[tuple[str, str]],
    ):
        xset = set(xg.vertices)
        wanted = set(_distance_pairs(xg)) | {p for p in requests if p[0] in xset and p[1] in xset}
        self.src_pairs = sorted(wanted)
        self.src_masks = pair_walk_masks(xg, bound, self.src_pairs)
        self.y_vertices = list(yg.vertices)
        self.y_index = {v: i for i, v in enumerate(self.y_vertices)}
        self.table = packed_pair_table(yg, bound)
        words = self.table.shape[2]
        self._ok_cache: dict[int, np.ndarray] = {}
        self._words = words

    def ok_matrix(self, mask: int) -> np.ndarray:
        """ok[yi, y2i] == True iff every walk length in ``mask`` exists y -> y2."""
        cached = self._ok_cache.get(mask)
        if cached is None:
            arr = np.frombuffer(
                mask.to_bytes(self._words * 8, "little"), dtype=np.uint64
            ).reshape(1, 1, self._words)
            cached = ~np.any(arr & ~self.table, axis=2)
            self._ok_cache[mask] = cached
        return cached


def _pair_walk_pass(
    ledger: ZeroLedger, state: _PairWalkState, xg: Graph | Digraph
) -> list[tuple[str, str, tuple]]:
    additions: list[tuple[str, str, tuple]] = []
    n = len(state.y_vertices)
    dead: dict[str, np.ndarray] = {}
    for x2 in xg.vertices:
        row = ledger._zero[x2]
        arr = np.zeros(n, dtype=bool)
        for yv in row:
            idx = state.y_index.get(yv)
            if idx is not None:
                arr[idx] = True
        dead[x2] = arr
    claimed: set[tuple[str, str]] = set()
    for xv, x2 in state.src_pairs:
        mask = state.src_masks[(xv, x2)]
        if mask == 0:
            # no walk at all within the bound: the expansion at x2 proves nothing
            continue
        ok = state.ok_matrix(mask)
        supported = np.any(ok & ~dead[x2][None, :], axis=1)
        row = ledger._zero[xv]
        for yi, yv in enumerate(state.y_vertices):
            if yv in row or (xv, yv) in claimed:
                continue
            if not supported[yi]:
                additions.append((xv, yv, (x2,)))
                claimed.add((xv, yv))
    return additions


def _static_rules(ledger: ZeroLedger, config: PruneConfig) -> None:
    xg, yg = ledger.source, ledger.target
    if "closed-walk" in config.rules:
        hits = rule_closed_walk(xg, yg, config.bound)
        for (xv, yv) in sorted(hits):
            ledger.add(xv, yv, "closed-walk", (hits[(xv, yv)],))
    if "color" in config.rules:
        hits_c = rule_color_localization(xg, config.target_obj, config.source_roles)
        for (xv, yv) in sorted(hits_c):
            ledger.add(xv, yv, "color", (hits_c[(xv, yv)],))


def _dynamic_fixed_point(
    ledger: ZeroLedger, xc: Graph | Digraph, yc: Graph | Digraph, config: PruneConfig
) -> None:
    state = None
    if "pair-walk" in config.rules and xc.vertices and yc.vertices:
        state = _PairWalkState(xc, yc, config.bound, config.pair_requests)
    while True:
        changed = False
        if "support" in config.rules:
            for xv, yv, detail in rule_support(xc, yc, ledger):
                changed |= ledger.add(xv, yv, "support", detail)
        if state is not None:
            for xv, yv, detail in _pair_walk_pass(ledger, state, xc):
                changed |= ledger.add(xv, yv, "pair-walk", detail)
        if not changed:
            return


def prune_closure(
    source,
    target,
    *,
    bound: int | None = None,
    rules: Sequence[str] | None = None,
    pair_requests: Iterable[tuple[str, str]] = (),
    source_roles: RoleMap | None = None,
    assume_zero: Iterable[tuple[str, str]] = (),
) -> ZeroLedger:
    """Run all enabled rules to a fixed point and return the ledger.

    When the source is weakly connected and the target splits into several
    weak components, each component is pruned separately: an infeasible branch
    proves every pair into that component zero, and the instance is infeasible
    overall exactly when every branch is.  Disconnected sources are handled
    per source component.
    """
    xg, auto_roles, src_obj = _as_plain(source)
    yg, _, tgt_obj = _as_plain(target)
    if xg.kind != yg.kind:
        raise GraphError(f"kind mismatch: {xg.kind} vs {yg.kind}")
    chosen = tuple(rules) if rules is not None else DEFAULT_RULES
    unknown = [r for r in chosen if r not in RULE_REGISTRY]
    if unknown:
        raise GraphError(f"unknown rule {unknown[0]!r}; known rules: {sorted(RULE_REGISTRY)}")
    roles = source_roles if source_roles is not None else auto_roles
    if "color" in chosen:
        if roles is None:
            raise GraphError("color rule needs source role annotations")
        if not isinstance(tgt_obj, ReplacementGraph):
            raise GraphError("color rule needs a replacement target with metadata")
    if bound is None:
        bound = default_bound(xg, yg)
    if bound < 0:
        raise GraphError(f"walk bound must be >= 0, got {bound}")
    requests = tuple(pair_requests)
    if isinstance(src_obj, Indicator):
        requests += ((src_obj.a, src_obj.b),)
    config = PruneConfig(bound, chosen, requests, roles, src_obj, tgt_obj)
    ledger = ZeroLedger(xg, yg, config)
    for xv, yv in assume_zero:
        if xv not in ledger._zero or yv not in set(yg.vertices):
            raise GraphError(f"assumed pair ({xv!r}, {yv!r}) outside the instance")
        ledger.add(xv, yv, "assumption", ())
    if not xg.vertices or not yg.vertices:
        return ledger

    _static_rules(ledger, config)
    x_comps = weak_components(xg)
    y_comps = weak_components(yg)
    for xc_vs in x_comps:
        xc = induced(xg, xc_vs)
        if len(y_comps) <= 1:
            _dynamic_fixed_point(ledger, xc, yg, config)
        else:
            for ci, yc_vs in enumerate(y_comps):
                yc = induced(yg, yc_vs)
                _dynamic_fixed_point(ledger, xc, yc, config)
                dead = next(
                    (xv for xv in xc_vs if all(ledger.is_zero(xv, yv) for yv in yc_vs)), None
                )
                if dead is not None:
                    for xv in xc_vs:
                        for yv in yc_vs:
                            ledger.add(xv, yv, "component", (dead, ci))
    return ledger


def check_trace(ledger: ZeroLedger) -> None:
    """Replay the trace, revalidating every derivation; raises TraceError on defects."""
    xg, yg = ledger.source, ledger.target
    config = ledger.config
    zero: dict[str, set[str]] = {x: set() for x in xg.vertices}
    yset = set(yg.vertices)
    cw_cache: dict[str, dict[str, int]] = {}
    pair_cache: dict[tuple[str, str, str], int] = {}
    y_comps = weak_components(yg)
    x_comp_of: dict[str, int] = {}
    for i, comp in enumerate(weak_components(xg)):
        for v in comp:
            x_comp_of[v] = i

    def cw(which: str, g) -> dict[str, int]:
        if which not in cw_cache:
            cw_cache[which] = closed_walk_masks(g, config.bound)
        return cw_cache[which]

    def pair_mask(which: str, g, u: str, v: str) -> int:
        key = (which, u, v)
        if key not in pair_cache:
            pair_cache[key] = pair_walk_masks(g, config.bound, [(u, v)])[(u, v)]
        return pair_cache[key]

    for i, entry in enumerate(ledger.trace):
        xv, yv, rule, detail = entry
        where = f"trace[{i}] {entry}"
        if xv not in zero or yv not in yset:
            raise TraceError(f"{where}: pair outside the instance")
        if yv in zero[xv]:
            raise TraceError(f"{where}: pair derived twice")
        if rule == "closed-walk":
            (ell,) = detail
            if not 0 <= ell <= config.bound:
                raise TraceError(f"{where}: length {ell} outside bound")
            if not (cw("x", xg)[xv] >> ell) & 1:
                raise TraceError(f"{where}: no closed walk of length {ell} at source")
            if (cw("y", yg)[yv] >> ell) & 1:
                raise TraceError(f"{where}: closed walk of length {ell} exists at target")
        elif rule == "support":
            direction, x2 = detail
            if x2 not in {w for _, w in _support_neighbors(xg, xv)}:
                raise TraceError(f"{where}: {x2!r} is not a constraint neighbor of {xv!r}")
            targets = _directed_targets(yg, yv, direction)
            bad = [y2 for y2 in targets if y2 not in zero[x2]]
            if bad:
                raise TraceError(f"{where}: surviving support {bad[0]!r} at {x2!r}")
        elif rule == "pair-walk":
            (x2,) = detail
            mask = pair_mask("x", xg, xv, x2)
            if mask == 0:
                raise TraceError(f"{where}: no source walk {xv!r}->{x2!r} within bound")
            for y2 in yg.vertices:
                if y2 in zero[x2]:
                    continue
                if mask & ~pair_mask("y", yg, yv, y2) == 0:
                    raise TraceError(f"{where}: unflagged surviving partner {y2!r}")
        elif rule == "color":
            (letter,) = detail
            roles = config.source_roles
            if roles is None or roles.role.get(xv) != letter:
                raise TraceError(f"{where}: source vertex does not carry color {letter!r}")
            if not isinstance(config.target_obj, ReplacementGraph):
                raise TraceError(f"{where}: no replacement metadata for the target")
            a_set, b_set, e_set = color_sets(config.target_obj)
            allowed = {"A": a_set, "B": b_set, "E": e_set}[letter]
            if yv in allowed:
                raise TraceError(f"{where}: target vertex is a {letter}-root")
        elif rule == "component":
            dead, ci = detail
            if not 0 <= ci < len(y_comps):
                raise TraceError(f"{where}: no target component {ci}")
            if yv not in y_comps[ci]:
                raise TraceError(f"{where}: target vertex outside component {ci}")
            if x_comp_of.get(dead) != x_comp_of.get(xv):
                raise TraceError(f"{where}: witness {dead!r} in a different source component")
            missing = [y2 for y2 in y_comps[ci] if y2 not in zero[dead]]
            if missing:
                raise TraceError(f"{where}: witness row still alive at {missing[0]!r}")
        elif rule == "assumption":
            pass
        else:
            raise TraceError(f"{where}: unknown rule")
        zero[xv].add(yv)

    if zero != ledger._zero:
        raise TraceError("replayed zero set differs from the ledger")
