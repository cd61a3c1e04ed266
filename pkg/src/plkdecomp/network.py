"""Reaction network data model and digraph analytics.

A network is stored as species ids, distinct complexes (rational vectors over
the species) and reactions (ordered complex index pairs). Most analytics take an
optional ``reactions`` argument: an iterable of reaction indices selecting the
subnetwork they should run on, so that decomposition blocks can be analysed
without re-indexing.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .linalg import Matrix, Subspace, Vector, as_fraction, as_vector


class NetworkError(ValueError):
    """Input violates the definition of a reaction network."""


@dataclass(frozen=True)
class Reaction:
    label: str
    reactant: int
    product: int


@dataclass(frozen=True)
class NetworkSummary:
    m: int
    n: int
    r: int
    l: int
    sl: int
    t: int
    s: int
    delta: int
    weakly_reversible: bool
    t_minimal: bool


@dataclass(frozen=True)
class StrongClass:
    complexes: tuple[int, ...]
    terminal: bool


@dataclass(frozen=True, eq=False)
class Network:
    species: tuple[str, ...]
    complexes: tuple[Vector, ...]
    reactions: tuple[Reaction, ...]

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.reactions)

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {q.label: i for i, q in enumerate(self.reactions)}

    @cached_property
    def species_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.species)}

    @cached_property
    def Y(self) -> Matrix:
        return Matrix.from_columns(self.complexes, rows=self.m)

    @cached_property
    def Ia(self) -> Matrix:
        rows = [[0] * self.r for _ in range(self.n)]
        for j, q in enumerate(self.reactions):
            rows[q.reactant][j] = -1
            rows[q.product][j] = 1
        return Matrix.from_rows(rows, cols=self.r)

    @cached_property
    def N(self) -> Matrix:
        return Matrix.from_columns(self.reaction_vectors, rows=self.m)

    @cached_property
    def reaction_vectors(self) -> tuple[Vector, ...]:
        return tuple(
            tuple(b - a for a, b in zip(self.complexes[q.reactant], self.complexes[q.product]))
            for q in self.reactions
        )

    @cached_property
    def out_arcs(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n)]
        for j, q in enumerate(self.reactions):
            out[q.reactant].append(j)
        return tuple(tuple(a) for a in out)

    @cached_property
    def in_arcs(self) -> tuple[tuple[int, ...], ...]:
        inc = [[] for _ in range(self.n)]
        for j, q in enumerate(self.reactions):
            inc[q.product].append(j)
        return tuple(tuple(a) for a in inc)

    @cached_property
    def arc_index(self) -> dict[tuple[int, int], int]:
        return {(q.reactant, q.product): j for j, q in enumerate(self.reactions)}

    def complex_name(self, i: int) -> str:
        return format_complex(self.complexes[i], self.species)

    def reaction_string(self, j: int) -> str:
        q = self.reactions[j]
        return f"{self.complex_name(q.reactant)} -> {self.complex_name(q.product)}"

    def reaction_indices(self, refs: Iterable) -> list[int]:
        """Translate labels (or pass through indices) to reaction indices."""
        out = []
        for ref in refs:
            if isinstance(ref, int):
                if not 0 <= ref < self.r:
                    raise NetworkError(f"reaction index {ref} out of range")
                out.append(ref)
            elif ref in self.label_index:
                out.append(self.label_index[ref])
            else:
                raise NetworkError(f"unknown reaction {ref!r}")
        return out

    def subnetwork(self, reactions: Iterable[int]) -> Network:
        """The subnetwork generated by a set of reactions, on the same species."""
        idx = sorted(set(reactions))
        used = sorted({c for j in idx for c in (self.reactions[j].reactant, self.reactions[j].product)})
        remap = {c: i for i, c in enumerate(used)}
        return Network(
            self.species,
            tuple(self.complexes[c] for c in used),
            tuple(
                Reaction(self.reactions[j].label, remap[self.reactions[j].reactant],
                         remap[self.reactions[j].product])
                for j in idx
            ),
        )


def format_complex(vec: Sequence[Fraction], species: Sequence[str]) -> str:
    terms = []
    for c, s in zip(vec, species):
        if c == 0:
            continue
        if c == 1:
            terms.append(s)
        else:
            terms.append(f"{_fmt_number(c)} {s}")
    return " + ".join(terms) if terms else "0"


def _fmt_number(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    # prefer a finite decimal when one exists
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        s = f"{float(x):.12f}".rstrip("0").rstrip(".")
        if Fraction(s) == x:
            return s
    return f"{x.numerator}/{x.denominator}"


def build_network(
    species: Sequence[str] | None,
    complexes: Sequence[Mapping[str, object] | Sequence],
    reactions: Sequence[tuple[str, int, int]],
    allow_negative: bool = False,
) -> Network:
    """Validate and build a network.

    ``complexes`` are either species->coefficient mappings or coefficient
    vectors aligned with ``species``. ``reactions`` are ``(label, reactant,
    product)`` with complex indices. If ``species`` is None it is inferred from
    mapping keys in order of first appearance.
    """
    if species is None:
        seen: dict[str, None] = {}
        for c in complexes:
            if not isinstance(c, Mapping):
                raise NetworkError("species must be declared when complexes are vectors")
            for s in c:
                seen.setdefault(s, None)
        species = list(seen)
    species = tuple(species)
    if len(set(species)) != len(species):
        raise NetworkError("duplicate species id")
    if not species:
        raise NetworkError("network has no species")
    sidx = {s: i for i, s in enumerate(species)}

    vecs = []
    for c in complexes:
        if isinstance(c, Mapping):
            v = [Fraction(0)] * len(species)
            for s, coef in c.items():
                if s not in sidx:
                    raise NetworkError(f"undeclared species {s!r}")
                v[sidx[s]] += as_fraction(coef)
            vec = tuple(v)
        else:
            vec = as_vector(c)
            if len(vec) != len(species):
                raise NetworkError("complex vector length differs from species count")
        if not allow_negative and any(x < 0 for x in vec):
            raise NetworkError(f"negative coefficient in complex {format_complex(vec, species)}")
        vecs.append(vec)
    if len(set(vecs)) != len(vecs):
        raise NetworkError("duplicate complex")

    rxns = []
    labels = set()
    pairs = set()
    used = set()
    for label, a, b in reactions:
        if label in labels:
            raise NetworkError(f"duplicate reaction label {label!r}")
        if not (0 <= a < len(vecs) and 0 <= b < len(vecs)):
            raise NetworkError(f"reaction {label!r} refers to an unknown complex")
        if a == b:
            raise NetworkError(f"reaction {label!r} is a self-loop")
        if (a, b) in pairs:
            raise NetworkError(f"reaction {label!r} duplicates an existing reactant/product pair")
        labels.add(label)
        pairs.add((a, b))
        used.update((a, b))
        rxns.append(Reaction(str(label), a, b))
    if not rxns:
        raise NetworkError("network has no reactions")
    orphans = [format_complex(vecs[i], species) for i in range(len(vecs)) if i not in used]
    if orphans:
        raise NetworkError(f"complex not in any reaction: {', '.join(orphans)}")
    return Network(species, tuple(vecs), tuple(rxns))


def from_edges(edges: Sequence[tuple[str, str]], labels: Sequence[str] | None = None) -> Network:
    """Monospecies network with one species per vertex name; "0" is the zero complex."""
    names: dict[str, None] = {}
    for a, b in edges:
        names.setdefault(a, None)
        names.setdefault(b, None)
    species = [v for v in names if v != "0"] or ["X"]
    complexes = [{} if v == "0" else {v: 1} for v in names]
    cidx = {v: i for i, v in enumerate(names)}
    labels = labels or [f"R{i + 1}" for i in range(len(edges))]
    return build_network(
        species, complexes, [(lab, cidx[a], cidx[b]) for lab, (a, b) in zip(labels, edges)]
    )


# ---------------------------------------------------------------- graph views


def _select(net: Network, reactions: Iterable[int] | None) -> list[int]:
    return list(range(net.r)) if reactions is None else sorted(set(reactions))


def complexes_of(net: Network, reactions: Iterable[int] | None = None) -> list[int]:
    sel = _select(net, reactions)
    return sorted({c for j in sel for c in (net.reactions[j].reactant, net.reactions[j].product)})


def linkage_classes(net: Network, reactions: Iterable[int] | None = None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Weakly connected components as ``(complexes, reactions)`` pairs.

    Ordered by smallest complex index.
    """
    sel = _select(net, reactions)
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in sel:
        q = net.reactions[j]
        for c in (q.reactant, q.product):
            parent.setdefault(c, c)
        ra, rb = find(q.reactant), find(q.product)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups_c: dict[int, list[int]] = defaultdict(list)
    groups_r: dict[int, list[int]] = defaultdict(list)
    for c in sorted(parent):
        groups_c[find(c)].append(c)
    for j in sel:
        groups_r[find(net.reactions[j].reactant)].append(j)
    roots = sorted(groups_c, key=lambda k: groups_c[k][0])
    return [(tuple(groups_c[k]), tuple(groups_r[k])) for k in roots]


def strong_components(net: Network, reactions: Iterable[int] | None = None) -> list[StrongClass]:
    """Strongly connected components (iterative Tarjan), ordered by smallest complex."""
    sel = _select(net, reactions)
    adj: dict[int, list[int]] = defaultdict(list)
    verts = set()
    for j in sel:
        q = net.reactions[j]
        adj[q.reactant].append(q.product)
        verts.update((q.reactant, q.product))
    for v in adj:
        adj[v].sort()

    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in sorted(verts):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            nbrs = adj.get(v, [])
            recursed = False
            while i < len(nbrs):
                w = nbrs[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recursed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recursed:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])

    which = {v: k for k, comp in enumerate(comps) for v in comp}
    leaves = [True] * len(comps)
    for j in sel:
        q = net.reactions[j]
        if which[q.reactant] != which[q.product]:
            leaves[which[q.reactant]] = False
    out = [StrongClass(tuple(c), leaves[k]) for k, c in enumerate(comps)]
    return sorted(out, key=lambda sc: sc.complexes[0])


def is_weakly_reversible(net: Network, reactions: Iterable[int] | None = None) -> bool:
    """Every reaction has its endpoints in one strong component."""
    sel = _select(net, reactions)
    comps = strong_components(net, sel)
    which = {v: k for k, sc in enumerate(comps) for v in sc.complexes}
    return all(which[net.reactions[j].reactant] == which[net.reactions[j].product] for j in sel)


def stoichiometric_subspace(net: Network, reactions: Iterable[int] | None = None) -> Subspace:
    sel = _select(net, reactions)
    return Subspace.span([net.reaction_vectors[j] for j in sel], net.m)


def summarize(net: Network, reactions: Iterable[int] | None = None) -> NetworkSummary:
    sel = _select(net, reactions)
    cx = complexes_of(net, sel)
    lcs = linkage_classes(net, sel)
    scs = strong_components(net, sel)
    s = stoichiometric_subspace(net, sel).dim
    species = {i for c in cx for i, x in enumerate(net.complexes[c]) if x != 0}
    n, l = len(cx), len(lcs)
    t = sum(sc.terminal for sc in scs)
    delta = n - l - s
    if delta < 0:
        raise ArithmeticError("negative deficiency; linear algebra is inconsistent")
    return NetworkSummary(
        m=len(species) if reactions is not None else net.m,
        n=n, r=len(sel), l=l, sl=len(scs), t=t, s=s, delta=delta,
        weakly_reversible=len(scs) == l,
        t_minimal=t == l,
    )


def degree_profile(net: Network, complex_index: int, reactions: Iterable[int] | None = None) -> tuple[int, int]:
    """``(in_degree, out_degree)`` of a complex."""
    sel = set(_select(net, reactions))
    return (
        sum(1 for j in net.in_arcs[complex_index] if j in sel),
        sum(1 for j in net.out_arcs[complex_index] if j in sel),
    )


def is_eulerian(net: Network, reactions: Iterable[int] | None = None) -> bool:
    """Connected component with in-degree equal to out-degree at every vertex."""
    sel = _select(net, reactions)
    if len(linkage_classes(net, sel)) != 1:
        return False
    return all(
        degree_profile(net, c, sel)[0] == degree_profile(net, c, sel)[1]
        for c in complexes_of(net, sel)
    )


def is_even(net: Network, reactions: Iterable[int] | None = None) -> bool:
    sel = _select(net, reactions)
    return all(
        degree_profile(net, c, sel)[0] == degree_profile(net, c, sel)[1]
        for c in complexes_of(net, sel)
    )


def eulerian_cycle_decomposition(net: Network, reactions: Iterable[int] | None = None) -> list[tuple[int, ...]]:
    """Partition an even arc set into simple cycles.

    Walks from the smallest vertex with an unused out-arc, always taking the
    smallest-index unused arc, and peels off a simple cycle whenever the walk
    revisits a vertex. Each cycle is returned as arc indices in traversal order.
    """
    sel = _select(net, reactions)
    if not is_even(net, sel):
        raise NetworkError("arc set is not even (in-degree != out-degree somewhere)")
    unused: dict[int, list[int]] = defaultdict(list)
    for j in sel:
        unused[net.reactions[j].reactant].append(j)
    for v in unused:
        unused[v].sort(reverse=True)  # pop() yields the smallest
    cycles: list[tuple[int, ...]] = []
    while True:
        start = min((v for v, arcs in unused.items() if arcs), default=None)
        if start is None:
            break
        path_vertices = [start]
        path_arcs: list[int] = []
        pos = {start: 0}
        v = start
        while True:
            if not unused[v]:
                # even graph: a walk can only stall at its start with an empty path
                assert not path_arcs
                break
            a = unused[v].pop()
            w = net.reactions[a].product
            path_arcs.append(a)
            if w in pos:
                k = pos[w]
                cycles.append(tuple(path_arcs[k:]))
                for x in path_vertices[k + 1:]:
                    del pos[x]
                del path_vertices[k + 1:]
                del path_arcs[k:]
            else:
                pos[w] = len(path_vertices)
                path_vertices.append(w)
            v = w
    return cycles


def reactant_complexes(net: Network, reactions: Iterable[int] | None = None) -> list[int]:
    sel = _select(net, reactions)
    return sorted({net.reactions[j].reactant for j in sel})


def is_cycle_terminal(net: Network, reactions: Iterable[int] | None = None) -> bool:
    return reactant_complexes(net, reactions) == complexes_of(net, reactions)
