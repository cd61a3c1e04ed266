"""Independent decompositions via the coordinate graph of the reaction vectors.

Pick a maximal independent set of reaction vectors greedily by reaction index,
express every other vector in that basis, and join two basis vertices whenever
some dependent vector uses both. The connected components of this graph are
the connected components of the vector matroid, which gives the finest
independent decomposition; every other independent decomposition is a
coarsening of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .decomposition import Decomposition, canonical_blocks, is_independent
from .linalg import Matrix, coordinates, rank
from .network import Network
from .search import (
    FOUND,
    NOT_FOUND_PROVEN,
    RESOURCE_LIMIT,
    SearchLimits,
    WRCFResult,
    _BranchLimit,
    _LabelSearch,
    _labels_to_blocks,
    coarsest_merge,
    verify_wr_cf,
    wr_cf_search,
)
from .cycles import simple_cycles
from .kinetics import nf_nodes


@dataclass(frozen=True)
class CoordinateGraph:
    basis: tuple[int, ...]  # reaction indices of the chosen basis vectors
    dependencies: dict[int, tuple[Fraction, ...]]  # non-basis reaction -> coefficients on basis
    edges: tuple[tuple[int, int], ...]  # pairs of positions into ``basis``

    @property
    def p(self) -> int:
        return len(self.basis)

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.p))
        g.add_edges_from(self.edges)
        return g

    def components(self) -> list[list[int]]:
        """Components as sorted lists of basis positions, ordered by smallest position."""
        return sorted((sorted(c) for c in nx.connected_components(self.graph())), key=lambda c: c[0])

    @property
    def connected(self) -> bool:
        return self.p <= 1 or nx.is_connected(self.graph())


@dataclass(frozen=True)
class FinestIndependent:
    decomposition: Decomposition
    component_map: tuple[int, ...]  # coordinate-graph component -> block index
    graph: CoordinateGraph

    @property
    def nontrivial(self) -> bool:
        return self.decomposition.k > 1


def coordinate_graph(net: Network) -> CoordinateGraph:
    vectors = net.reaction_vectors
    basis: list[int] = []
    for j, v in enumerate(vectors):
        if rank(Matrix.from_rows([vectors[b] for b in basis] + [v], cols=net.m)) > len(basis):
            basis.append(j)
    basis_vecs = [vectors[b] for b in basis]
    deps: dict[int, tuple[Fraction, ...]] = {}
    edges: set[tuple[int, int]] = set()
    for j, v in enumerate(vectors):
        if j in basis:
            continue
        coef = coordinates(v, basis_vecs)
        assert coef is not None
        deps[j] = tuple(coef)
        support = [i for i, c in enumerate(coef) if c != 0]
        edges.update((a, b) for x, a in enumerate(support) for b in support[x + 1:])
    return CoordinateGraph(tuple(basis), deps, tuple(sorted(edges)))


def finest_independent(net: Network) -> FinestIndependent:
    cg = coordinate_graph(net)
    comps = cg.components()
    where = {pos: ci for ci, comp in enumerate(comps) for pos in comp}
    groups: list[list[int]] = [[cg.basis[p] for p in comp] for comp in comps]
    for j, coef in cg.dependencies.items():
        owners = {where[i] for i, c in enumerate(coef) if c != 0}
        assert len(owners) == 1
        groups[owners.pop()].append(j)
    if not groups:
        groups = [list(range(net.r))]
    blocks = canonical_blocks(groups)
    order = {b[0]: i for i, b in enumerate(blocks)}
    cmap = tuple(order[min(g)] for g in groups)
    return FinestIndependent(Decomposition(net, blocks), cmap, cg)


def independent_wr_cf(net, F, limits: SearchLimits | None = None) -> WRCFResult:
    """An independent WR CF-decomposition, or a proof that none exists.

    First the exhaustive search result is lumped as far as CF allows and
    tested. If that representative is dependent, a second search runs where
    every block of the finest independent decomposition must stay inside one
    label. Independent decompositions are exactly the coarsenings of the
    finest one, so this second search decides existence.
    """
    limits = limits or SearchLimits()
    first = wr_cf_search(net, F, "exhaustive", limits)
    if not first.found:
        return first
    coarse = coarsest_merge(net, F, first.decomposition)
    res = WRCFResult(FOUND, "exhaustive", cycles_enumerated=first.cycles_enumerated,
                     branches_explored=first.branches_explored,
                     eulerian_classes=first.eulerian_classes)
    if is_independent(net, coarse.blocks):
        res.decomposition = coarse
        return res

    finest = finest_independent(net)
    cycles, truncated = simple_cycles(net, None, limits.max_cycles)
    res.cycles_enumerated += len(cycles)
    search = _LabelSearch(net, F, list(range(net.r)), cycles, set(nf_nodes(net, F)), limits,
                          groups=finest.decomposition.blocks)
    try:
        labels = search.run()
    except _BranchLimit:
        res.branches_explored += search.branches
        res.outcome, res.reason = RESOURCE_LIMIT, "branch limit reached"
        return res
    res.branches_explored += search.branches
    if labels is None:
        if truncated:
            res.outcome = RESOURCE_LIMIT
            res.reason = "cycle limit reached before the search was exhausted"
        else:
            res.outcome = NOT_FOUND_PROVEN
            res.reason = "every WR CF-decomposition has dependent stoichiometric subspaces"
        return res
    D = coarsest_merge(net, F, Decomposition(net, canonical_blocks(_labels_to_blocks(labels))))
    ok, _ = verify_wr_cf(net, F, D)
    assert ok and is_independent(net, D.blocks)
    res.decomposition = D
    return res

