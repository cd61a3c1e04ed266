"""Search for weakly reversible complex-factorizable (WR CF) decompositions.

Two modes are offered.

``greedy``
    Follows the published single-NF-node procedure literally: one cycle per
    branching reaction, taken first in lexicographic arc order, then leftover
    reactions attached through cycles of the NF node. It never backtracks, so
    a negative answer is reported as ``not_found_greedy``.

``exhaustive``
    A backtracking cycle-cover search. Reactions are visited in a fixed order.
    Each uncovered reaction is covered by a simple cycle that is committed,
    together with a block label, to all of its arcs. A label class stays CF
    because every node's arcs inside one label must share a kinetic-order row.
    Every block of a WR CF-decomposition is a union of simple cycles, so this
    enumeration reaches a witness whenever one exists. A negative answer is
    therefore ``not_found_proven``, provided the cycle enumeration was not
    truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cycles import CycleEnumeration, cycles_through, enumerate_cycles_through, simple_cycles
from .decomposition import Decomposition, canonical_blocks
from .kinetics import classify_nodes, is_cf, node_class, nf_nodes
from .linalg import Matrix
from .network import (
    Network,
    _select,
    complexes_of,
    eulerian_cycle_decomposition,
    is_eulerian,
    is_weakly_reversible,
    linkage_classes,
)

FOUND = "found"
NOT_FOUND_PROVEN = "not_found_proven"
NOT_FOUND_GREEDY = "not_found_greedy"
RESOURCE_LIMIT = "resource_limit"


class SearchError(ValueError):
    """Precondition of a search routine violated."""


class _BranchLimit(Exception):
    pass


@dataclass(frozen=True)
class SearchLimits:
    max_cycles: int = 10_000
    max_branches: int = 1_000_000


@dataclass
class WRCFResult:
    outcome: str
    mode: str
    decomposition: Decomposition | None = None
    cycles_enumerated: int = 0
    branches_explored: int = 0
    reason: str = ""
    eulerian_classes: list[int] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.outcome == FOUND

    def blocks_as_labels(self) -> list[list[str]] | None:
        return None if self.decomposition is None else self.decomposition.as_labels()

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "outcome": self.outcome,
            "blocks": self.blocks_as_labels(),
            "statistics": {
                "cycles_enumerated": self.cycles_enumerated,
                "branches_explored": self.branches_explored,
            },
            "reason": self.reason,
            "eulerian_linkage_classes": self.eulerian_classes,
        }


@dataclass(frozen=True)
class CFCCovering:
    anchor: int
    cf_subsets: tuple[tuple[int, ...], ...]
    enumeration: CycleEnumeration
    blocks: tuple[tuple[int, ...], ...]  # reactions of all i-cycles, per CF-subset
    is_decomposition: bool


# ------------------------------------------------------------------ checking


def verify_wr_cf(net: Network, F: Matrix, blocks: Decomposition | Sequence[Iterable[int]]) -> tuple[bool, list[str]]:
    """Independent check that every block is weakly reversible and CF."""
    if isinstance(blocks, Decomposition):
        blocks = blocks.blocks
    violations = []
    for i, b in enumerate(blocks, 1):
        b = list(b)
        if not is_weakly_reversible(net, b):
            violations.append(f"block {i} is not weakly reversible")
        for y in nf_nodes(net, F, b):
            violations.append(
                f"block {i}: node {net.complex_name(y)} has branching reactions with different kinetic orders"
            )
    return not violations, violations


def _check_single_preconditions(net: Network, F: Matrix, y: int, sel: list[int], only_nf: bool) -> None:
    if not is_weakly_reversible(net, sel):
        raise SearchError("network is not weakly reversible")
    if len(linkage_classes(net, sel)) != 1:
        raise SearchError("network has more than one linkage class")
    nf = nf_nodes(net, F, sel)
    if y not in nf:
        raise SearchError(f"{net.complex_name(y)} is not an NF node")
    if not only_nf and len(nf) > 1:
        raise SearchError("network has more than one NF node")


# ------------------------------------------------------------------ covering


def cfc_covering(net: Network, F: Matrix, y: int, reactions: Iterable[int] | None = None,
                 limit: int = 10_000) -> CFCCovering:
    """Per CF-subset of ``y``, the reactions of all its cycles through ``y``."""
    sel = _select(net, reactions)
    _check_single_preconditions(net, F, y, sel, only_nf=False)
    enum = enumerate_cycles_through(net, F, y, limit, sel)
    blocks = tuple(tuple(sorted({a for c in group for a in c.arcs})) for group in enum.by_cf)
    disjoint = all(
        not set(blocks[i]) & set(blocks[j])
        for i in range(len(blocks)) for j in range(i + 1, len(blocks))
    )
    return CFCCovering(y, node_class(net, F, y, sel).cf_subsets, enum, blocks, disjoint)


# ------------------------------------------------------------ greedy procedure


def _greedy_single(net: Network, F: Matrix, y: int, sel: list[int], limits: SearchLimits) -> WRCFResult:
    nc = node_class(net, F, y, sel)
    seqs, truncated = cycles_through(net, y, sel, limits.max_cycles)
    res = WRCFResult(NOT_FOUND_GREEDY, "greedy", cycles_enumerated=len(seqs))
    k = nc.n_cf
    blocks: list[set[int]] = [set() for _ in range(k)]

    def others(i):
        return set().union(*(blocks[j] for j in range(k) if j != i))

    for beta, subset in enumerate(nc.cf_subsets):
        for rho in subset:
            taken = others(beta)
            choice = next((c for c in seqs if c[0] == rho and not taken.intersection(c)), None)
            res.branches_explored += 1
            if choice is None:
                res.reason = (f"no cycle through {net.labels[rho]} avoids reactions already "
                              f"committed to other CF-subsets")
                if truncated:
                    res.outcome = RESOURCE_LIMIT
                return res
            blocks[beta].update(choice)

    for r in sel:
        if any(r in b for b in blocks):
            continue
        placed = False
        for c in seqs:
            if r not in c:
                continue
            j = nc.cf_index(c[0])
            res.branches_explored += 1
            if not others(j).intersection(c):
                blocks[j].update(c)
                placed = True
                break
        if not placed:
            res.reason = (f"leftover reaction {net.labels[r]} lies on no cycle through "
                          f"{net.complex_name(y)} compatible with the committed blocks")
            if truncated:
                res.outcome = RESOURCE_LIMIT
            return res
    res.outcome = FOUND
    res.decomposition = Decomposition(net, canonical_blocks(blocks))
    return res


# ------------------------------------------------------- backtracking search


class _LabelSearch:
    """Cycle-cover labelling search.

    ``cf_nodes``: nodes whose arcs within one label must share a kinetic row.
    ``fixed``: initial arc -> label assignments.
    ``groups``: arcs that must end up in the same label (lists of arc sets).
    ``max_labels``: if set, labels range over ``0..max_labels-1`` only;
    otherwise a fresh label is always an option.
    """

    def __init__(self, net: Network, F: Matrix, arcs: list[int], cycles: list[tuple[int, ...]],
                 cf_nodes: set[int], limits: SearchLimits, fixed: dict[int, int] | None = None,
                 groups: Sequence[Iterable[int]] = (), max_labels: int | None = None,
                 cycle_key=None):
        self.net, self.F = net, F
        self.arcs = arcs
        self.cf_nodes = cf_nodes
        self.limits = limits
        self.max_labels = max_labels
        self.branches = 0
        self.by_arc: dict[int, list[tuple[int, ...]]] = {a: [] for a in arcs}
        for c in cycles:
            for a in c:
                self.by_arc[a].append(c)
        if cycle_key is not None:
            for a in arcs:
                self.by_arc[a].sort(key=cycle_key)
        self.group_of: dict[int, tuple[int, ...]] = {}
        for g in groups:
            g = tuple(sorted(g))
            for a in g:
                self.group_of[a] = g
        self.label: dict[int, int] = {}
        self.covered: set[int] = set()
        self.row_of: dict[tuple[int, int], tuple] = {}
        self.row_count: dict[tuple[int, int], int] = {}
        self.n_labels = max_labels or 0
        self._initial = dict(fixed or {})

    # -- state mutation with undo log
    def _assign(self, a: int, L: int, log: list) -> bool:
        cur = self.label.get(a)
        if cur is not None:
            return cur == L
        tail = self.net.reactions[a].reactant
        if tail in self.cf_nodes:
            key = (L, tail)
            row = self.F.row(a)
            have = self.row_of.get(key)
            if have is not None and have != row:
                return False
            if have is None:
                self.row_of[key] = row
            self.row_count[key] = self.row_count.get(key, 0) + 1
        self.label[a] = L
        log.append(("label", a))
        for b in self.group_of.get(a, ()):
            if b != a and not self._assign(b, L, log):
                return False
        return True

    def _undo(self, log: list) -> None:
        while log:
            kind, a = log.pop()
            if kind == "label":
                L = self.label.pop(a)
                tail = self.net.reactions[a].reactant
                if tail in self.cf_nodes:
                    key = (L, tail)
                    self.row_count[key] -= 1
                    if not self.row_count[key]:
                        del self.row_count[key]
                        del self.row_of[key]
            elif kind == "cover":
                self.covered.discard(a)
            elif kind == "newlabel":
                self.n_labels -= 1

    def _feasible(self, c: tuple[int, ...], L: int) -> bool:
        for a in c:
            cur = self.label.get(a)
            if cur is not None and cur != L:
                return False
            tail = self.net.reactions[a].reactant
            if tail in self.cf_nodes:
                have = self.row_of.get((L, tail))
                if have is not None and have != self.F.row(a):
                    return False
        return True

    def _options(self, c: tuple[int, ...]) -> list[int]:
        labels = {self.label[a] for a in c if a in self.label}
        if len(labels) > 1:
            return []
        if labels:
            L = labels.pop()
            return [L] if self._feasible(c, L) else []
        opts = [L for L in range(self.n_labels) if self._feasible(c, L)]
        if self.max_labels is None:
            opts.append(self.n_labels)  # fresh label
        return opts

    def _has_support(self, a: int) -> bool:
        return any(self._options(c) for c in self.by_arc[a])

    def run(self) -> dict[int, int] | None:
        log: list = []
        for a, L in sorted(self._initial.items()):
            if not self._assign(a, L, log):
                return None
        if self.max_labels is None and self.label:
            self.n_labels = max(self.label.values()) + 1
        return self._dfs()

    def _dfs(self) -> dict[int, int] | None:
        a = next((x for x in self.arcs if x not in self.covered), None)
        if a is None:
            return dict(self.label)
        for c in self.by_arc[a]:
            for L in self._options(c):
                self.branches += 1
                if self.branches > self.limits.max_branches:
                    raise _BranchLimit
                log: list = []
                if L == self.n_labels:
                    self.n_labels += 1
                    log.append(("newlabel", None))
                ok = all(self._assign(x, L, log) for x in c)
                if ok:
                    for x in c:
                        if x not in self.covered:
                            self.covered.add(x)
                            log.append(("cover", x))
                    # forward check: every uncovered arc keeps at least one option
                    if all(self._has_support(x) for x in self.arcs if x not in self.covered):
                        found = self._dfs()
                        if found is not None:
                            return found
                self._undo(log)
        return None


def _labels_to_blocks(labels: dict[int, int]) -> list[list[int]]:
    by: dict[int, list[int]] = {}
    for a, L in labels.items():
        by.setdefault(L, []).append(a)
    return [sorted(v) for _, v in sorted(by.items())]


def _exhaustive_single(net: Network, F: Matrix, y: int, sel: list[int], limits: SearchLimits) -> WRCFResult:
    nc = node_class(net, F, y, sel)
    k = nc.n_cf
    cycles, truncated = simple_cycles(net, sel, limits.max_cycles)
    res = WRCFResult(NOT_FOUND_PROVEN, "exhaustive", cycles_enumerated=len(cycles))
    through_y = {c: _rotate_to(net, c, y) for c in cycles if any(net.reactions[a].reactant == y for a in c)}

    def key(c):
        # cycles through y first (in their y-anchored arc order), then the rest
        return (0, through_y[c]) if c in through_y else (1, c)

    y_arcs = [a for sub in nc.cf_subsets for a in sub]
    order = y_arcs + [a for a in sel if a not in set(y_arcs)]
    fixed = {a: i for i, sub in enumerate(nc.cf_subsets) for a in sub}
    # labels 0..k-1 follow the CF-subsets of y; label k collects cycles avoiding y
    search = _LabelSearch(net, F, order, cycles, {y}, limits, fixed=fixed, max_labels=k + 1, cycle_key=key)
    try:
        labels = search.run()
    except _BranchLimit:
        res.outcome, res.reason = RESOURCE_LIMIT, "branch limit reached"
        res.branches_explored = search.branches
        return res
    res.branches_explored = search.branches
    if labels is None:
        if truncated:
            res.outcome, res.reason = RESOURCE_LIMIT, "cycle limit reached before the search was exhausted"
        else:
            res.reason = "no assignment of cycles to CF-subsets covers every reaction"
        return res
    blocks = [[a for a, L in labels.items() if L == i] for i in range(k)]
    rest = sorted(a for a, L in labels.items() if L == k)
    if rest:
        # merging is safe: y is the only constrained node and rest has no arc of y
        rest_cx = set(complexes_of(net, rest))
        target = next((i for i, b in enumerate(blocks) if rest_cx & set(complexes_of(net, b))), 0)
        blocks[target].extend(rest)
    res.outcome = FOUND
    res.decomposition = Decomposition(net, canonical_blocks(blocks))
    return res


def _rotate_to(net: Network, cycle: tuple[int, ...], y: int) -> tuple[int, ...]:
    for i, a in enumerate(cycle):
        if net.reactions[a].reactant == y:
            return cycle[i:] + cycle[:i]
    return cycle


def wr_cf_single(net: Network, F: Matrix, y: int, mode: str = "exhaustive",
                 limits: SearchLimits | None = None, reactions: Iterable[int] | None = None,
                 treat_as_only_nf: bool = False) -> WRCFResult:
    """WR CF-decomposition of a single weakly reversible linkage class around NF node ``y``.

    On success the decomposition has one block per CF-subset of ``y``, and
    block ``i`` holds exactly the branching reactions of ``y`` in CF-subset ``i``.
    With ``treat_as_only_nf`` other NF nodes are ignored, as in one step of
    the greedy multi-node refinement.
    """
    limits = limits or SearchLimits()
    sel = _select(net, reactions)
    _check_single_preconditions(net, F, y, sel, treat_as_only_nf)
    if mode == "greedy":
        return _greedy_single(net, F, y, sel, limits)
    if mode == "exhaustive":
        return _exhaustive_single(net, F, y, sel, limits)
    raise SearchError(f"unknown mode {mode!r}")


def _exhaustive_general(net: Network, F: Matrix, sel: list[int], limits: SearchLimits,
                        groups: Sequence[Iterable[int]] = ()) -> WRCFResult:
    cycles, truncated = simple_cycles(net, sel, limits.max_cycles)
    res = WRCFResult(NOT_FOUND_PROVEN, "exhaustive", cycles_enumerated=len(cycles))
    cf_nodes = set(nf_nodes(net, F))
    search = _LabelSearch(net, F, list(sel), cycles, cf_nodes, limits, groups=groups)
    try:
        labels = search.run()
    except _BranchLimit:
        res.branches_explored = search.branches
        res.outcome, res.reason = RESOURCE_LIMIT, "branch limit reached"
        return res
    res.branches_explored = search.branches
    if labels is None:
        if truncated:
            res.outcome, res.reason = RESOURCE_LIMIT, "cycle limit reached before the search was exhausted"
        else:
            res.reason = "no CF-consistent cycle cover of the reactions exists"
        return res
    res.outcome = FOUND
    res.decomposition = Decomposition(net, canonical_blocks(_labels_to_blocks(labels)))
    return res


# ------------------------------------------------------------ whole network


def _refine_greedy(net: Network, F: Matrix, cls: tuple[int, ...], nf: list[int],
                   limits: SearchLimits, res: WRCFResult) -> list[list[int]] | None:
    blocks: list[list[int]] = [list(cls)]
    for y in nf:
        refined: list[list[int]] = []
        for b in blocks:
            if y not in complexes_of(net, b) or not node_class(net, F, y, b).is_nf:
                refined.append(b)
                continue
            for cx, comp in linkage_classes(net, b):
                if y not in cx:
                    refined.append(list(comp))
                    continue
                sub = _greedy_single(net, F, y, list(comp), limits)
                res.cycles_enumerated += sub.cycles_enumerated
                res.branches_explored += sub.branches_explored
                if not sub.found:
                    res.outcome = sub.outcome
                    res.reason = f"at NF node {net.complex_name(y)}: {sub.reason}"
                    return None
                refined.extend(list(x) for x in sub.decomposition.blocks)
        blocks = refined
    return blocks


def wr_cf_search(net: Network, F: Matrix, mode: str = "exhaustive", limits: SearchLimits | None = None,
                 eulerian_fast_path: bool = False) -> WRCFResult:
    """Weakly reversible CF-decomposition of the whole network, linkage class by linkage class."""
    limits = limits or SearchLimits()
    if mode not in ("greedy", "exhaustive"):
        raise SearchError(f"unknown mode {mode!r}")
    res = WRCFResult(NOT_FOUND_PROVEN, mode)
    lcs = linkage_classes(net)
    res.eulerian_classes = [i for i, (_, rs) in enumerate(lcs) if is_eulerian(net, rs)]
    if not is_weakly_reversible(net):
        res.reason = "network is not weakly reversible, so no weakly reversible decomposition exists"
        return res

    blocks: list[list[int]] = []
    pending: list[WRCFResult] = []
    for i, (_, rs) in enumerate(lcs):
        nf = nf_nodes(net, F, rs)
        if not nf:
            blocks.append(list(rs))
            continue
        if eulerian_fast_path and i in res.eulerian_classes:
            blocks.extend(list(c) for c in eulerian_cycle_decomposition(net, rs))
            continue
        if mode == "greedy":
            sub = WRCFResult(FOUND, mode)
            got = _refine_greedy(net, F, rs, nf, limits, sub)
            res.cycles_enumerated += sub.cycles_enumerated
            res.branches_explored += sub.branches_explored
            if got is None:
                pending.append(sub)
                continue
            blocks.extend(got)
        else:
            if len(nf) == 1:
                sub = _exhaustive_single(net, F, nf[0], list(rs), limits)
            else:
                sub = _exhaustive_general(net, F, list(rs), limits)
            res.cycles_enumerated += sub.cycles_enumerated
            res.branches_explored += sub.branches_explored
            if not sub.found:
                pending.append(sub)
                continue
            blocks.extend(list(b) for b in sub.decomposition.blocks)

    if pending:
        outcomes = [p.outcome for p in pending]
        for o in (NOT_FOUND_PROVEN, RESOURCE_LIMIT, NOT_FOUND_GREEDY):
            if o in outcomes:
                res.outcome = o
                res.reason = next(p.reason for p in pending if p.outcome == o)
                break
        return res
    D = Decomposition(net, canonical_blocks(blocks))
    ok, violations = verify_wr_cf(net, F, D)
    if not ok:
        raise AssertionError(f"search produced an invalid decomposition: {violations}")
    res.outcome = FOUND
    res.decomposition = D
    return res


def coarsest_merge(net: Network, F: Matrix, D: Decomposition) -> Decomposition:
    """Greedily lump blocks while the union stays CF (unions of WR blocks stay WR)."""
    blocks = [list(b) for b in D.blocks]
    merged = True
    while merged:
        merged = False
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if is_cf(net, F, blocks[i] + blocks[j]):
                    blocks[i] = blocks[i] + blocks[j]
                    del blocks[j]
                    merged = True
                    break
            if merged:
                break
    return Decomposition(net, canonical_blocks(blocks))
