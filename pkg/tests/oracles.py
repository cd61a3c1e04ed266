"""Brute-force reference implementations used only by the tests."""

from __future__ import annotations

from itertools import combinations

import sympy

from plkdecomp.network import Network


def dfs_cycles_through(net: Network, y: int, reactions=None) -> set[tuple[int, ...]]:
    """Every simple directed cycle through ``y`` as an arc sequence starting at ``y``."""
    sel = set(range(net.r)) if reactions is None else set(reactions)
    out = set()

    def walk(v, visited, path):
        for a in net.out_arcs[v]:
            if a not in sel:
                continue
            w = net.reactions[a].product
            if w == y:
                out.add(tuple(path + [a]))
            elif w not in visited:
                walk(w, visited | {w}, path + [a])

    walk(y, {y}, [])
    return out


def dfs_all_cycles(net: Network) -> set[frozenset[int]]:
    found = set()
    for y in range(net.n):
        found |= {frozenset(c) for c in dfs_cycles_through(net, y)}
    return found


def exact_rank(vectors, m: int) -> int:
    if not vectors:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in v] for v in vectors]).rank()


def _strongly_connected_parts(net: Network, arcs) -> bool:
    """Weak reversibility by transitive closure (independent of the library's Tarjan)."""
    arcs = list(arcs)
    nodes = {c for a in arcs for c in (net.reactions[a].reactant, net.reactions[a].product)}
    reach = {v: {v} for v in nodes}
    changed = True
    while changed:
        changed = False
        for a in arcs:
            u, w = net.reactions[a].reactant, net.reactions[a].product
            for v in nodes:
                if u in reach[v] and not reach[w] <= reach[v]:
                    reach[v] |= reach[w]
                    changed = True
    return all(net.reactions[a].reactant in reach[net.reactions[a].product] for a in arcs)


def _cf(net: Network, F, arcs) -> bool:
    rows = {}
    for a in arcs:
        y = net.reactions[a].reactant
        if rows.setdefault(y, F.row(a)) != F.row(a):
            return False
    return True


def brute_wr_cf_exists(net: Network, F, reactions=None) -> bool:
    """Exact cover of the reactions by subsets that are each weakly reversible and CF."""
    sel = sorted(range(net.r) if reactions is None else reactions)
    full = (1 << len(sel)) - 1
    good = set()
    for mask in range(1, full + 1):
        arcs = [sel[i] for i in range(len(sel)) if mask >> i & 1]
        if _cf(net, F, arcs) and _strongly_connected_parts(net, arcs):
            good.add(mask)
    memo = {0: True}

    def cover(mask):
        if mask in memo:
            return memo[mask]
        low = mask & -mask
        sub = mask
        ok = False
        while sub:
            if sub & low and sub in good and cover(mask & ~sub):
                ok = True
                break
            sub = (sub - 1) & mask
        memo[mask] = ok
        return ok

    return cover(full)


def independent_two_block_partitions(net: Network) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    total = exact_rank(list(net.reaction_vectors), net.m)
    out = []
    rest = list(range(1, net.r))
    for k in range(0, len(rest)):
        for extra in combinations(rest, k):
            a = (0,) + extra
            b = tuple(j for j in range(net.r) if j not in a)
            if not b:
                continue
            ra = exact_rank([net.reaction_vectors[j] for j in a], net.m)
            rb = exact_rank([net.reaction_vectors[j] for j in b], net.m)
            if ra + rb == total:
                out.append((a, b))
    return out


def brute_independent_wr_cf_exists(net: Network, F, reactions=None) -> bool:
    """Some exact cover by WR CF subsets whose block ranks add up to the total rank."""
    sel = sorted(range(net.r) if reactions is None else reactions)
    full = (1 << len(sel)) - 1
    good = []
    for mask in range(1, full + 1):
        arcs = [sel[i] for i in range(len(sel)) if mask >> i & 1]
        if _cf(net, F, arcs) and _strongly_connected_parts(net, arcs):
            good.append(mask)
    total = exact_rank([net.reaction_vectors[j] for j in sel], net.m)
    rank_of = {}

    def block_rank(mask):
        if mask not in rank_of:
            rank_of[mask] = exact_rank([net.reaction_vectors[sel[i]] for i in range(len(sel)) if mask >> i & 1], net.m)
        return rank_of[mask]

    def cover(mask, acc):
        if acc > total:
            return False
        if not mask:
            return acc == total
        low = mask & -mask
        return any(g & low and g & mask == g and cover(mask & ~g, acc + block_rank(g)) for g in good)

    return cover(full, 0)
