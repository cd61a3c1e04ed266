"""The network of kinetic complexes of a cycle-terminal power-law system.

Every reactant ``y`` contributes its distinct kinetic-order rows as kinetic
complexes. A reaction ``y -> y'`` contributes every pair of a kinetic complex
of ``y`` and one of ``y'``; pairs with equal ends are dropped. Kinetic
complexes are identified globally by their order vector, so two reactants that
share a row also share the kinetic complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .decomposition import Decomposition, is_independent
from .kinetics import check_kinetics, classify_system, node_class
from .linalg import Matrix, Subspace, Vector, sum_of
from .network import (
    Network,
    NetworkSummary,
    _select,
    build_network,
    format_complex,
    is_cycle_terminal,
    is_weakly_reversible,
    reactant_complexes,
    stoichiometric_subspace,
    summarize,
)


class KineticComplexError(ValueError):
    pass


@dataclass(frozen=True)
class KineticComplexNetwork:
    network: Network | None  # None when every kinetic pair degenerated into a loop
    provenance: dict[str, tuple[int, ...]]  # kinetic reaction label -> original reactions
    per_reaction: dict[int, tuple[tuple[Vector, Vector], ...]]  # loop-free pairs of each reaction
    loops: dict[int, int]  # reaction -> number of pairs removed as loops
    orphans: tuple[int, ...]  # reactions all of whose pairs were loops
    summary: NetworkSummary | None
    flux_space: Subspace

    @property
    def n(self) -> int:
        return 0 if self.network is None else self.network.n

    @property
    def r(self) -> int:
        return 0 if self.network is None else self.network.r

    @property
    def l(self) -> int:
        return 0 if self.summary is None else self.summary.l

    @property
    def s(self) -> int:
        return self.flux_space.dim

    @property
    def deficiency(self) -> int:
        return self.n - self.l - self.s

    def order_vectors(self) -> list[Vector]:
        return [] if self.network is None else list(self.network.complexes)


def _kinetic_complexes_of(net: Network, F: Matrix, y: int, sel: list[int]) -> list[Vector]:
    nc = node_class(net, F, y, sel)
    return [F.row(sub[0]) for sub in nc.cf_subsets]


def kinetic_network(net: Network, F: Matrix, reactions: Iterable[int] | None = None,
                    label_prefix: str = "k") -> KineticComplexNetwork:
    """Kinetic-complex network of the whole system or of a reaction subset."""
    check_kinetics(net, F)
    sel = _select(net, reactions)
    if not is_cycle_terminal(net, sel):
        raise KineticComplexError("kinetic complexes are defined only for cycle-terminal networks")
    kc = {y: _kinetic_complexes_of(net, F, y, sel) for y in reactant_complexes(net, sel)}

    order: dict[Vector, int] = {}
    pair_src: dict[tuple[Vector, Vector], list[int]] = {}
    per_reaction: dict[int, tuple[tuple[Vector, Vector], ...]] = {}
    loops: dict[int, int] = {}
    for q in sel:
        rx = net.reactions[q]
        pairs = []
        dropped = 0
        for a in kc[rx.reactant]:
            for b in kc[rx.product]:
                if a == b:
                    dropped += 1
                    continue
                pairs.append((a, b))
                pair_src.setdefault((a, b), []).append(q)
        per_reaction[q] = tuple(pairs)
        loops[q] = dropped
    for a, b in pair_src:
        order.setdefault(a, len(order))
        order.setdefault(b, len(order))
    orphans = tuple(q for q in sel if not per_reaction[q])

    if not pair_src:
        return KineticComplexNetwork(None, {}, per_reaction, loops, orphans, None,
                                     Subspace.zero(net.m))
    vecs = sorted(order, key=order.get)
    rxns = []
    provenance = {}
    for i, (pair, src) in enumerate(pair_src.items(), 1):
        label = f"{label_prefix}{i}"
        rxns.append((label, order[pair[0]], order[pair[1]]))
        provenance[label] = tuple(src)
    knet = build_network(net.species, vecs, rxns, allow_negative=True)
    return KineticComplexNetwork(knet, provenance, per_reaction, loops, orphans,
                                 summarize(knet), stoichiometric_subspace(knet))


@dataclass
class KineticCountsReport:
    per_reaction: dict[str, tuple[int, int]] = field(default_factory=dict)  # label -> (actual, formula)
    n_tilde: int = 0
    n_bound: int = 0
    r_tilde: int = 0
    r_bound: int = 0
    interaction_span_surjective: bool = False
    equalities_hold: bool | None = None
    l: int = 0
    l_tilde: int = 0

    @property
    def ok(self) -> bool:
        formula = all(a == b for a, b in self.per_reaction.values())
        bounds = self.n_tilde <= self.n_bound and self.r_tilde <= self.r_bound
        return formula and bounds and self.equalities_hold is not False


def kinetic_counts_check(net: Network, F: Matrix) -> KineticCountsReport:
    """Count identities for kinetic complexes and kinetic reactions.

    Per reaction the number of loop-free pairs must equal the product of the
    CF-subset counts of its ends minus their shared kinetic complexes. The
    totals are bounded by the corresponding sums, with equality (and equal
    linkage-class counts) under interaction-span-surjective kinetics.
    """
    kn = kinetic_network(net, F)
    sel = list(range(net.r))
    kc = {y: set(_kinetic_complexes_of(net, F, y, sel)) for y in reactant_complexes(net)}
    rep = KineticCountsReport()
    for q, rx in enumerate(net.reactions):
        a, b = kc[rx.reactant], kc[rx.product]
        rep.per_reaction[rx.label] = (len(kn.per_reaction[q]), len(a) * len(b) - len(a & b))
    rep.n_tilde, rep.r_tilde = kn.n, kn.r
    rep.n_bound = sum(len(v) for v in kc.values())
    rep.r_bound = sum(len(kc[rx.reactant]) * len(kc[rx.product]) for rx in net.reactions)
    rep.interaction_span_surjective = classify_system(net, F).interaction_span_surjective
    rep.l = summarize(net).l
    rep.l_tilde = kn.l
    if rep.interaction_span_surjective:
        rep.equalities_hold = (rep.n_tilde == rep.n_bound and rep.r_tilde == rep.r_bound
                               and rep.l == rep.l_tilde)
    return rep


@dataclass
class InducedDecomposition:
    blocks: list[KineticComplexNetwork]
    union: Network | None
    n_tilde: int
    l_tilde: int
    s_tilde: int
    is_decomposition: bool
    independent: bool  # induced level
    incidence_independent: bool  # induced level
    bi_level_independent: bool | None
    bi_level_weakly_reversible: bool | None
    bi_level_bi_independent: bool | None
    equal_flux_dims: bool  # dim S_i == dim S~_i for every block
    relations: dict[str, bool] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def deficiency(self) -> int:
        return self.n_tilde - self.l_tilde - self.s_tilde


def induced_decomposition(net: Network, F: Matrix, D: Decomposition) -> InducedDecomposition:
    """Per-block kinetic-complex networks, their union and the bi-level flags."""
    warnings = []
    for i, b in enumerate(D.blocks, 1):
        if classify_system(net, F, b).kind != "PL-RDK":
            warnings.append(f"block {i} is not PL-RDK")
    blocks = [kinetic_network(net, F, b, label_prefix=f"b{i}k") for i, b in enumerate(D.blocks, 1)]

    pair_sets = [{(k.network.complexes[x.reactant], k.network.complexes[x.product])
                  for x in k.network.reactions} if k.network else set() for k in blocks]
    seen: set = set()
    disjoint = True
    for ps in pair_sets:
        if seen & ps:
            disjoint = False
        seen |= ps
    union_pairs = [p for ps in pair_sets for p in sorted(ps, key=_pair_key)]
    union_pairs = list(dict.fromkeys(union_pairs))
    order: dict[Vector, int] = {}
    for a, b in union_pairs:
        order.setdefault(a, len(order))
        order.setdefault(b, len(order))
    union = None
    n_t = l_t = s_t = 0
    if union_pairs:
        union = build_network(net.species, sorted(order, key=order.get),
                              [(f"u{i}", order[a], order[b]) for i, (a, b) in enumerate(union_pairs, 1)],
                              allow_negative=True)
        us = summarize(union)
        n_t, l_t, s_t = us.n, us.l, us.s

    induced_indep = sum(k.s for k in blocks) == s_t
    induced_inc = sum(k.n - k.l for k in blocks) == n_t - l_t
    whole = summarize(net)
    base_indep = is_independent(net, D.blocks)
    base_inc = sum(x.n - x.l for x in D.summaries) == whole.n - whole.l
    equal_dims = all(S.dim == k.s for S, k in zip(D.subspaces, blocks))

    if disjoint:
        bl_indep = base_indep and induced_indep
        bl_wr = (all(x.weakly_reversible for x in D.summaries)
                 and all(k.network is not None and is_weakly_reversible(k.network) for k in blocks))
        bl_bi = bl_indep and base_inc and induced_inc
    else:
        warnings.append("induced covering is not a decomposition; bi-level flags suppressed")
        bl_indep = bl_wr = bl_bi = None

    relations: dict[str, bool] = {}
    fss = classify_system(net, F).interaction_span_surjective
    if disjoint and base_indep and base_inc and fss and equal_dims:
        relations = {
            "n_minus_l": n_t - l_t == whole.n - whole.l,
            "flux_rank": s_t == whole.s,
            "deficiency": n_t - l_t - s_t == whole.delta,
        }
    return InducedDecomposition(
        blocks=blocks, union=union, n_tilde=n_t, l_tilde=l_t, s_tilde=s_t,
        is_decomposition=disjoint, independent=induced_indep, incidence_independent=induced_inc,
        bi_level_independent=bl_indep, bi_level_weakly_reversible=bl_wr,
        bi_level_bi_independent=bl_bi, equal_flux_dims=equal_dims,
        relations=relations, warnings=warnings,
    )


def _pair_key(p: tuple[Vector, Vector]):
    return (tuple(p[0]), tuple(p[1]))


def flux_space_sum(ind: InducedDecomposition, ambient: int) -> Subspace:
    return sum_of([k.flux_space for k in ind.blocks], ambient)


def describe_kinetic_complex(vec: Vector, species) -> str:
    return format_complex(vec, species)
