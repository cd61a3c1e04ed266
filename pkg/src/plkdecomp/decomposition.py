"""Decompositions of a network into subnetworks induced by reaction partitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .linalg import Matrix, Subspace, sum_of
from .network import (
    Network,
    NetworkSummary,
    complexes_of,
    linkage_classes,
    stoichiometric_subspace,
    summarize,
)


class DecompositionError(ValueError):
    pass


def canonical_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    """Sort within blocks and order blocks by their smallest member."""
    return tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))


@dataclass(frozen=True)
class Decomposition:
    net: Network = field(compare=False, repr=False)
    blocks: tuple[tuple[int, ...], ...]

    @property
    def k(self) -> int:
        return len(self.blocks)

    @cached_property
    def summaries(self) -> tuple[NetworkSummary, ...]:
        return tuple(summarize(self.net, b) for b in self.blocks)

    @cached_property
    def subspaces(self) -> tuple[Subspace, ...]:
        return tuple(stoichiometric_subspace(self.net, b) for b in self.blocks)

    @cached_property
    def block_complexes(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(complexes_of(self.net, b)) for b in self.blocks)

    def subnetworks(self) -> list[Network]:
        return [self.net.subnetwork(b) for b in self.blocks]

    def block_of(self, reaction: int) -> int:
        for i, b in enumerate(self.blocks):
            if reaction in b:
                return i
        raise KeyError(reaction)

    def as_labels(self) -> list[list[str]]:
        return [[self.net.labels[j] for j in b] for b in self.blocks]


@dataclass(frozen=True)
class DecompositionProfile:
    independent: bool
    incidence_independent: bool
    bi_independent: bool
    weakly_reversible: bool
    zdd: bool
    common_complexes: tuple[int, ...]
    kind: str  # "C", "C*" or "neither"
    s: int
    block_ranks: tuple[int, ...]
    n_minus_l: int
    block_n_minus_l: tuple[int, ...]
    delta: int
    block_deficiencies: tuple[int, ...]

    @property
    def deficiency_relation(self) -> str:
        total = sum(self.block_deficiencies)
        return "=" if self.delta == total else ("<" if self.delta < total else ">")


def make_decomposition(net: Network, blocks: Sequence[Iterable]) -> Decomposition:
    """Build a decomposition from blocks of reaction labels or indices.

    The blocks must partition the reaction set: no empty blocks, no overlaps,
    no gaps.
    """
    idx_blocks = []
    for b in blocks:
        ib = net.reaction_indices(list(b))
        if not ib:
            raise DecompositionError("empty block")
        if len(set(ib)) != len(ib):
            raise DecompositionError("reaction repeated inside a block")
        idx_blocks.append(ib)
    seen: dict[int, int] = {}
    for k, b in enumerate(idx_blocks):
        for j in b:
            if j in seen:
                raise DecompositionError(
                    f"reaction {net.labels[j]} appears in blocks {seen[j] + 1} and {k + 1}"
                )
            seen[j] = k
    missing = [net.labels[j] for j in range(net.r) if j not in seen]
    if missing:
        raise DecompositionError(f"reactions not covered: {', '.join(missing)}")
    return Decomposition(net, canonical_blocks(idx_blocks))


def trivial_decomposition(net: Network) -> Decomposition:
    return Decomposition(net, (tuple(range(net.r)),))


def linkage_class_decomposition(net: Network) -> Decomposition:
    return Decomposition(net, canonical_blocks(rs for _, rs in linkage_classes(net)))


def common_complexes(D: Decomposition) -> tuple[int, ...]:
    count: dict[int, int] = {}
    for cx in D.block_complexes:
        for c in cx:
            count[c] = count.get(c, 0) + 1
    return tuple(sorted(c for c, k in count.items() if k > 1))


def profile(net: Network, D: Decomposition) -> DecompositionProfile:
    """Independence flags, common complexes and deficiency bookkeeping.

    The inequalities between the network deficiency and the sum of block
    deficiencies implied by (incidence) independence are re-checked and a
    violation raises ``ArithmeticError``.
    """
    whole = summarize(net)
    sums = D.summaries
    block_ranks = tuple(x.s for x in sums)
    block_nl = tuple(x.n - x.l for x in sums)
    block_def = tuple(x.delta for x in sums)
    independent = sum(block_ranks) == whole.s
    inc_independent = sum(block_nl) == whole.n - whole.l
    cd = common_complexes(D)
    if independent and whole.delta > sum(block_def):
        raise ArithmeticError("independent decomposition with delta > sum of block deficiencies")
    if inc_independent and whole.delta < sum(block_def):
        raise ArithmeticError("incidence independent decomposition with delta < sum of block deficiencies")
    if len(cd) <= 1 and not inc_independent:
        raise ArithmeticError("C*-decomposition that is not incidence independent")
    return DecompositionProfile(
        independent=independent,
        incidence_independent=inc_independent,
        bi_independent=independent and inc_independent,
        weakly_reversible=all(x.weakly_reversible for x in sums),
        zdd=all(d == 0 for d in block_def),
        common_complexes=cd,
        kind="C" if not cd else ("C*" if len(cd) == 1 else "neither"),
        s=whole.s,
        block_ranks=block_ranks,
        n_minus_l=whole.n - whole.l,
        block_n_minus_l=block_nl,
        delta=whole.delta,
        block_deficiencies=block_def,
    )


def is_independent(net: Network, blocks: Iterable[Iterable[int]]) -> bool:
    blocks = [list(b) for b in blocks]
    total = sum(stoichiometric_subspace(net, b).dim for b in blocks)
    return total == stoichiometric_subspace(net).dim


def is_coarsening(fine: Decomposition, coarse: Decomposition) -> bool:
    """True when every block of ``fine`` lies inside a block of ``coarse``."""
    where = {j: i for i, b in enumerate(coarse.blocks) for j in b}
    return all(len({where.get(j) for j in b}) == 1 and None not in {where.get(j) for j in b}
               for b in fine.blocks)


def coarsen(D: Decomposition, groups: Sequence[Sequence[int]]) -> Decomposition:
    """Merge blocks; ``groups`` lists block indices to unite (unlisted blocks stay)."""
    used = [i for g in groups for i in g]
    if len(set(used)) != len(used):
        raise DecompositionError("a block appears in two merge groups")
    if any(not 0 <= i < D.k for i in used):
        raise DecompositionError("merge group refers to an unknown block")
    merged = [[j for i in g for j in D.blocks[i]] for g in groups if g]
    rest = [list(D.blocks[i]) for i in range(D.k) if i not in set(used)]
    return Decomposition(D.net, canonical_blocks(merged + rest))


# ----------------------------------------------------- equilibria relations


@dataclass
class EquilibriaRelationReport:
    independent: bool
    tol: float
    points: list[dict] = field(default_factory=list)
    inclusion_holds: bool = True
    equality_holds: bool = True


def equilibria_relation_check(net: Network, F: Matrix, k: Sequence[float], D: Decomposition,
                              points: Iterable[Sequence[float]], tol: float = 1e-9) -> EquilibriaRelationReport:
    """Spot-check how block equilibria relate to equilibria of the whole network.

    A point equilibrating every block must equilibrate the network. When the
    decomposition is independent the converse must hold as well. Residuals are
    infinity norms of the species formation rates.
    """
    from .kinetics import reaction_rates

    indep = is_independent(net, D.blocks)
    report = EquilibriaRelationReport(independent=indep, tol=tol)
    V = np.array([[float(x) for x in v] for v in net.reaction_vectors], dtype=float).reshape(net.r, net.m)
    for x in points:
        rates = reaction_rates(net, F, k, x)
        whole = float(np.max(np.abs(V.T @ rates))) if net.m else 0.0
        blocks = []
        for b in D.blocks:
            idx = list(b)
            blocks.append(float(np.max(np.abs(V[idx].T @ rates[idx]))))
        all_blocks = all(r < tol for r in blocks)
        entry = {"point": list(map(float, x)), "residual": whole, "block_residuals": blocks}
        if all_blocks and not whole < tol * max(1, len(blocks)):
            report.inclusion_holds = False
        if indep and whole < tol and not all_blocks:
            report.equality_holds = False
        report.points.append(entry)
    return report
