"""Simple-cycle enumeration on reaction digraphs (Johnson's circuit search)."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

from .linalg import Matrix
from .network import Network, _select


class CycleLimitExceeded(Exception):
    pass


@dataclass(frozen=True)
class SimpleCycle:
    arcs: tuple[int, ...]  # traversal order, starting with the arc leaving the anchor
    anchor: int
    branch_reaction: int
    cf_index: int


@dataclass(frozen=True)
class CycleEnumeration:
    anchor: int
    by_cf: tuple[tuple[SimpleCycle, ...], ...]
    truncated: bool

    @property
    def cycles(self) -> list[SimpleCycle]:
        return sorted((c for group in self.by_cf for c in group), key=lambda c: c.arcs)

    def __len__(self) -> int:
        return sum(len(g) for g in self.by_cf)


def _adjacency(net: Network, sel: Iterable[int]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = defaultdict(list)
    for j in sorted(sel):
        adj[net.reactions[j].reactant].append(j)
    return adj


def _johnson_from(net: Network, s: int, adj: dict[int, list[int]], allowed, emit) -> None:
    """All elementary circuits through ``s`` using only vertices in ``allowed``."""
    blocked: set[int] = set()
    B: dict[int, set[int]] = defaultdict(set)
    path_arcs: list[int] = []

    def unblock(u: int) -> None:
        stack = [u]
        while stack:
            w = stack.pop()
            if w in blocked:
                blocked.discard(w)
                stack.extend(B[w])
                B[w].clear()

    def circuit(v: int) -> bool:
        found = False
        blocked.add(v)
        for a in adj.get(v, ()):
            w = net.reactions[a].product
            if w not in allowed:
                continue
            if w == s:
                emit(tuple(path_arcs) + (a,))
                found = True
            elif w not in blocked:
                path_arcs.append(a)
                if circuit(w):
                    found = True
                path_arcs.pop()
        if found:
            unblock(v)
        else:
            for a in adj.get(v, ()):
                w = net.reactions[a].product
                if w in allowed:
                    B[w].add(v)
        return found

    circuit(s)


def cycles_through(net: Network, y: int, reactions: Iterable[int] | None = None,
                   limit: int = 10_000) -> tuple[list[tuple[int, ...]], bool]:
    """Arc sequences of all simple cycles through ``y``, sorted lexicographically.

    Returns ``(cycles, truncated)``; enumeration stops after ``limit`` cycles.
    """
    sel = _select(net, reactions)
    adj = _adjacency(net, sel)
    verts = {c for j in sel for c in (net.reactions[j].reactant, net.reactions[j].product)}
    out: list[tuple[int, ...]] = []

    def emit(c):
        if len(out) >= limit:
            raise CycleLimitExceeded
        out.append(c)

    truncated = False
    if y in verts:
        try:
            _johnson_from(net, y, adj, verts, emit)
        except CycleLimitExceeded:
            truncated = True
    return sorted(out), truncated


def simple_cycles(net: Network, reactions: Iterable[int] | None = None,
                  limit: int = 10_000) -> tuple[list[tuple[int, ...]], bool]:
    """All simple cycles; each starts at its smallest complex. Sorted by arc sequence."""
    sel = _select(net, reactions)
    adj = _adjacency(net, sel)
    verts = sorted({c for j in sel for c in (net.reactions[j].reactant, net.reactions[j].product)})
    out: list[tuple[int, ...]] = []

    def emit(c):
        if len(out) >= limit:
            raise CycleLimitExceeded
        out.append(c)

    truncated = False
    try:
        for i, s in enumerate(verts):
            _johnson_from(net, s, adj, set(verts[i:]), emit)
    except CycleLimitExceeded:
        truncated = True
    return sorted(out), truncated


def cycle_vertices(net: Network, arcs: Iterable[int]) -> list[int]:
    return [net.reactions[a].reactant for a in arcs]


def enumerate_cycles_through(net: Network, F: Matrix, y: int, limit: int = 10_000,
                             reactions: Iterable[int] | None = None) -> CycleEnumeration:
    """Simple cycles through ``y`` grouped by the CF-subset of their branching reaction."""
    from .kinetics import node_class

    sel = _select(net, reactions)
    nc = node_class(net, F, y, sel)
    seqs, truncated = cycles_through(net, y, sel, limit)
    groups: list[list[SimpleCycle]] = [[] for _ in nc.cf_subsets]
    for seq in seqs:
        i = nc.cf_index(seq[0])
        groups[i].append(SimpleCycle(seq, y, seq[0], i))
    return CycleEnumeration(y, tuple(tuple(g) for g in groups), truncated)
