"""Exact-length walk tables via iterated boolean matrix-vector products.

Reachability sets are packed into uint64 words, one row per vertex, and
advanced one length at a time; walk-length sets per vertex pair are returned
as Python ints with bit ``l`` set iff a walk of length ``l`` exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .graphs import Digraph, Graph, GraphError

__all__ = [
    "WalkTable",
    "walk_table",
    "closed_walk_masks",
    "pair_walk_masks",
    "full_walk_masks",
    "packed_pair_table",
    "lowest_bit",
]

# Full pair tables above this many bits are refused outright.
TABLE_BIT_BUDGET = 1 << 30


def lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _step_arrays(g: Graph | Digraph, index: dict[str, int]):
    if g.directed:
        raw = g.sorted_arcs()
    else:
        raw = []
        for u, v in g.sorted_edges():
            raw.append((u, v))
            raw.append((v, u))
    if not raw:
        return None
    arr = sorted((index[u], index[v]) for u, v in raw)
    srcs = np.array([a for a, _ in arr], dtype=np.int64)
    dsts = np.array([b for _, b in arr], dtype=np.int64)
    uniq, starts = np.unique(srcs, return_index=True)
    return dsts, uniq, starts


def _iter_levels(g: Graph | Digraph, bound: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (length, packed reach matrix); row u has bit v set iff a walk u->v of that length exists."""
    n = len(g.vertices)
    width = max(1, (n + 63) >> 6)
    reach = np.zeros((n, width), dtype=np.uint64)
    if n:
        ar = np.arange(n)
        reach[ar, ar >> 6] = np.left_shift(np.ones(n, dtype=np.uint64), (ar & 63).astype(np.uint64))
    yield 0, reach
    if bound <= 0 or n == 0:
        return
    index = {v: i for i, v in enumerate(g.vertices)}
    step = _step_arrays(g, index)
    if step is None:
        empty = np.zeros_like(reach)
        for ell in range(1, bound + 1):
            yield ell, empty
        return
    dsts, uniq, starts = step
    for ell in range(1, bound + 1):
        nxt = np.zeros_like(reach)
        nxt[uniq] = np.bitwise_or.reduceat(reach[dsts], starts, axis=0)
        reach = nxt
        yield ell, reach


def _row_to_int(row: np.ndarray) -> int:
    return int.from_bytes(row.tobytes(), "little")


def closed_walk_masks(g: Graph | Digraph, bound: int) -> dict[str, int]:
    """Per vertex, the set of closed-walk lengths up to ``bound`` as a bitmask."""
    if bound < 0:
        raise GraphError(f"walk bound must be >= 0, got {bound}")
    n = len(g.vertices)
    words = (bound >> 6) + 1
    acc = np.zeros((n, words), dtype=np.uint64)
    if n:
        ar = np.arange(n)
        word = ar >> 6
        shift = (ar & 63).astype(np.uint64)
        for ell, reach in _iter_levels(g, bound):
            bits = (reach[ar, word] >> shift) & np.uint64(1)
            hit = np.flatnonzero(bits)
            if hit.size:
                acc[hit, ell >> 6] |= np.uint64(1 << (ell & 63))
    return {g.vertices[i]: _row_to_int(acc[i]) for i in range(n)}


def pair_walk_masks(
    g: Graph | Digraph, bound: int, pairs: Iterable[tuple[str, str]]
) -> dict[tuple[str, str], int]:
    """Walk-length bitmasks for the requested ordered vertex pairs."""
    if bound < 0:
        raise GraphError(f"walk bound must be >= 0, got {bound}")
    pairs = list(pairs)
    index = {v: i for i, v in enumerate(g.vertices)}
    for u, v in pairs:
        for w in (u, v):
            if w not in index:
                raise GraphError(f"unknown vertex {w!r}")
    words = (bound >> 6) + 1
    acc = np.zeros((len(pairs), words), dtype=np.uint64)
    if pairs and g.vertices:
        pu = np.array([index[u] for u, _ in pairs], dtype=np.int64)
        pv = np.array([index[v] for _, v in pairs], dtype=np.int64)
        word = pv >> 6
        shift = (pv & 63).astype(np.uint64)
        for ell, reach in _iter_levels(g, bound):
            bits = (reach[pu, word] >> shift) & np.uint64(1)
            hit = np.flatnonzero(bits)
            if hit.size:
                acc[hit, ell >> 6] |= np.uint64(1 << (ell & 63))
    return {pairs[i]: _row_to_int(acc[i]) for i in range(len(pairs))}


def packed_pair_table(g: Graph | Digraph, bound: int) -> np.ndarray:
    """Dense (n, n, words) table of walk-length bitmasks for every ordered pair."""
    if bound < 0:
        raise GraphError(f"walk bound must be >= 0, got {bound}")
    n = len(g.vertices)
    if n * n * (bound + 1) > TABLE_BIT_BUDGET:
        raise GraphError(
            f"walk table for {n} vertices at bound {bound} exceeds the size budget; "
            "lower the bound or restrict the requested pairs"
        )
    words = (bound >> 6) + 1
    table = np.zeros((n, n, words), dtype=np.uint64)
    for ell, reach in _iter_levels(g, bound):
        bits = np.unpackbits(reach.view(np.uint8), axis=1, bitorder="little", count=n)
        table[:, :, ell >> 6] |= bits.astype(np.uint64) << np.uint64(ell & 63)
    return table


def full_walk_masks(g: Graph | Digraph, bound: int) -> dict[tuple[str, str], int]:
    table = packed_pair_table(g, bound)
    verts = g.vertices
    return {
        (verts[i], verts[j]): _row_to_int(table[i, j])
        for i in range(len(verts))
        for j in range(len(verts))
    }


@dataclass(frozen=True)
class WalkTable:
    """Boolean table walk(u, v, l) for all vertex pairs and 0 <= l <= bound."""

    bound: int
    directed: bool
    vertices: tuple[str, ...]
    masks: dict[tuple[str, str], int]

    def walk(self, u: str, v: str, length: int) -> bool:
        if not 0 <= length <= self.bound:
            raise GraphError(f"length {length} outside table bound {self.bound}")
        return bool((self.masks[(u, v)] >> length) & 1)

    def lengths(self, u: str, v: str) -> tuple[int, ...]:
        mask = self.masks[(u, v)]
        return tuple(i for i in range(self.bound + 1) if (mask >> i) & 1)


def walk_table(g: Graph | Digraph, bound: int) -> WalkTable:
    """Materialize the full walk table (guarded by a size budget)."""
    return WalkTable(bound, g.directed, g.vertices, full_walk_masks(g, bound))
