"""Seeded random instances for validation runs and property tests."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .linalg import Matrix
from .network import Network, build_network, from_edges, is_weakly_reversible, linkage_classes
from .kinetics import mass_action_orders


def random_digraph(rng: np.random.Generator, max_vertices: int = 8, max_arcs: int = 14) -> Network:
    """Monospecies network on a random simple digraph (no loops, no parallel arcs)."""
    while True:
        nv = int(rng.integers(2, max_vertices + 1))
        pairs = [(a, b) for a in range(nv) for b in range(nv) if a != b]
        na = int(rng.integers(1, min(max_arcs, len(pairs)) + 1))
        pick = rng.choice(len(pairs), size=na, replace=False)
        edges = [(f"V{pairs[i][0]}", f"V{pairs[i][1]}") for i in sorted(pick)]
        return from_edges(edges)


def _strongly_connected_edges(rng: np.random.Generator, nv: int, r: int) -> list[tuple[int, int]]:
    order = list(rng.permutation(nv))
    edges = {(order[i], order[(i + 1) % nv]) for i in range(nv)} if nv > 1 else set()
    others = [(a, b) for a in range(nv) for b in range(nv) if a != b and (a, b) not in edges]
    rng.shuffle(others)
    for e in others[: max(0, r - len(edges))]:
        edges.add(e)
    return sorted(edges)


def random_single_nf(rng: np.random.Generator, max_reactions: int = 9) -> tuple[Network, Matrix]:
    """Weakly reversible single-linkage-class network with exactly one NF node."""
    while True:
        nv = int(rng.integers(3, 7))
        r = int(rng.integers(nv + 1, max(nv + 2, max_reactions + 1)))
        r = min(r, max_reactions, nv * (nv - 1))
        edges = _strongly_connected_edges(rng, nv, r)
        net = from_edges([(f"X{a}", f"X{b}") for a, b in edges])
        outs = [y for y in range(net.n) if len(net.out_arcs[y]) >= 2]
        if not outs:
            continue
        y = int(rng.choice(outs))
        arcs = list(net.out_arcs[y])
        k = int(rng.integers(2, min(3, len(arcs)) + 1))
        groups = [i % k for i in range(len(arcs))]
        rng.shuffle(groups)
        rows = [list(row) for row in mass_action_orders(net).row_list()]
        sp = int(np.flatnonzero([c != 0 for c in net.complexes[y]])[0])
        for a, g in zip(arcs, groups):
            rows[a][sp] = Fraction(g + 1, 2)
        return net, Matrix.from_rows(rows, cols=net.m)


def random_multi_nf(rng: np.random.Generator, max_reactions: int = 9) -> tuple[Network, Matrix]:
    """Weakly reversible monospecies network where several nodes may be NF."""
    while True:
        nv = int(rng.integers(3, 6))
        r = min(int(rng.integers(nv + 1, max_reactions + 1)), nv * (nv - 1))
        net = from_edges([(f"X{a}", f"X{b}") for a, b in _strongly_connected_edges(rng, nv, r)])
        rows = [list(row) for row in mass_action_orders(net).row_list()]
        for y in range(net.n):
            arcs = net.out_arcs[y]
            if len(arcs) < 2 or rng.random() < 0.4:
                continue
            sp = int(np.flatnonzero([c != 0 for c in net.complexes[y]])[0])
            for a in arcs:
                rows[a][sp] = Fraction(int(rng.integers(1, 3)), 1)
        return net, Matrix.from_rows(rows, cols=net.m)


def random_network(rng: np.random.Generator, max_reactions: int = 8, max_species: int = 4,
                   max_coef: int = 2) -> Network:
    """Network with random multi-species complexes."""
    while True:
        m = int(rng.integers(1, max_species + 1))
        r = int(rng.integers(1, max_reactions + 1))
        ncx = int(rng.integers(2, 2 * r + 1))
        vecs = {tuple(int(x) for x in rng.integers(0, max_coef + 1, size=m)) for _ in range(ncx)}
        vecs = sorted(vecs)
        if len(vecs) < 2:
            continue
        pairs = [(a, b) for a in range(len(vecs)) for b in range(len(vecs)) if a != b]
        pick = rng.choice(len(pairs), size=min(r, len(pairs)), replace=False)
        chosen = [pairs[i] for i in sorted(pick)]
        used = sorted({c for p in chosen for c in p})
        remap = {c: i for i, c in enumerate(used)}
        species = [f"S{i}" for i in range(m)]
        return build_network(
            species, [vecs[c] for c in used],
            [(f"R{j + 1}", remap[a], remap[b]) for j, (a, b) in enumerate(chosen)],
        )


def random_partition(rng: np.random.Generator, r: int) -> list[list[int]]:
    k = int(rng.integers(1, r + 1))
    labels = rng.integers(0, k, size=r)
    blocks: dict[int, list[int]] = {}
    for j, g in enumerate(labels):
        blocks.setdefault(int(g), []).append(j)
    return list(blocks.values())


def random_zero_deficiency_system(rng: np.random.Generator, max_species: int = 4) -> tuple[Network, Matrix, np.ndarray]:
    """Weakly reversible PL-RDK system on monospecies complexes with generic kinetic orders.

    The network has deficiency zero. Rows are redrawn until both the kinetic
    complex deficiency and the kinetic deficiency vanish.
    """
    from .kinetic_complexes import kinetic_network
    from .network import summarize

    while True:
        m = int(rng.integers(2, max_species + 1))
        # split species into linkage classes, each strongly connected
        cut = sorted(set(int(c) for c in rng.integers(1, m, size=int(rng.integers(0, 2)))))
        parts = np.split(np.arange(m), cut)
        edges: list[tuple[str, str]] = []
        for part in parts:
            if len(part) < 2:
                break
            nv = len(part)
            r = int(rng.integers(nv, nv * (nv - 1) + 1))
            for a, b in _strongly_connected_edges(rng, nv, r):
                edges.append((f"X{part[a]}", f"X{part[b]}"))
        else:
            net = from_edges(edges)
            if not is_weakly_reversible(net) or len(linkage_classes(net)) != len(parts):
                continue
            rows_by_node = {y: [Fraction(int(v), 2) for v in rng.integers(-1, 5, size=net.m)] for y in range(net.n)}
            F = Matrix.from_rows([rows_by_node[q.reactant] for q in net.reactions], cols=net.m)
            summ = summarize(net)
            kn = kinetic_network(net, F)
            if summ.delta == 0 and kn.deficiency == 0 and summ.n - summ.l - kn.s == 0:
                k = np.exp(rng.normal(scale=0.5, size=net.r))
                return net, F, k
