from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given

from plkdecomp import generators
from plkdecomp.decomposition import is_independent, linkage_class_decomposition, make_decomposition
from plkdecomp.kinetic_complexes import (
    KineticComplexError,
    induced_decomposition,
    kinetic_counts_check,
    kinetic_network,
)
from plkdecomp.kinetics import mass_action_orders
from plkdecomp.linalg import subspace_intersection_dim
from plkdecomp.network import from_edges, is_cycle_terminal, is_weakly_reversible, summarize

from .strategies import multi_nf, seeds

SUB_BLOCKS = [[f"r{i}" for i in range(1, 5)], [f"r{i}" for i in range(5, 9)]]


def test_schmitz_sub_kinetic_network(schmitz_sub):
    net, F = schmitz_sub.network, schmitz_sub.F
    kn = kinetic_network(net, F)
    assert (kn.n, kn.l, kn.s, kn.deficiency) == (7, 1, 6, 0)
    assert not kn.orphans and is_weakly_reversible(kn.network)
    counts = kinetic_counts_check(net, F)
    assert counts.ok and counts.n_tilde == counts.n_bound == 7


def test_schmitz_sub_induced(schmitz_sub):
    net, F = schmitz_sub.network, schmitz_sub.F
    D = make_decomposition(net, SUB_BLOCKS)
    ind = induced_decomposition(net, F, D)
    assert (ind.n_tilde, ind.l_tilde, ind.s_tilde) == (7, 2, 5)
    whole = summarize(net)
    assert ind.n_tilde - ind.l_tilde == whole.n - whole.l == 5
    assert ind.deficiency == whole.delta == 0
    assert ind.is_decomposition and ind.bi_level_independent and ind.bi_level_weakly_reversible
    assert ind.equal_flux_dims and all(ind.relations.values()) and ind.relations
    a, b = (k.flux_space for k in ind.blocks)
    assert subspace_intersection_dim(a, b) == 0
    assert not ind.warnings


def test_mass_action_reproduces_the_network():
    net = from_edges([("A", "B"), ("B", "C"), ("C", "A"), ("C", "B")])
    kn = kinetic_network(net, mass_action_orders(net))
    s = summarize(net)
    assert (kn.n, kn.r, kn.l, kn.s) == (s.n, s.r, s.l, s.s)


def test_requires_cycle_terminal():
    net = from_edges([("A", "B")])
    with pytest.raises(KineticComplexError):
        kinetic_network(net, mass_action_orders(net))


def test_shared_rows_collapse_into_loops():
    # both reactants use the same order row, so A -> B becomes a loop
    from plkdecomp.linalg import Matrix

    net = from_edges([("A", "B"), ("B", "A"), ("B", "C"), ("C", "B")])
    F = Matrix.from_rows([[1, 0, 0], [1, 0, 0], [1, 0, 0], [1, 0, 0]], cols=3)
    kn = kinetic_network(net, F)
    assert kn.orphans == (0, 1, 2, 3) and kn.network is None and kn.s == 0
    counts = kinetic_counts_check(net, F)
    assert counts.ok and not counts.interaction_span_surjective


@given(multi_nf)
def test_kinetic_network_invariants(inst):
    net, F = inst
    kn = kinetic_network(net, F)
    assert kn.deficiency >= 0
    assert kn.network is None or is_weakly_reversible(kn.network)
    counts = kinetic_counts_check(net, F)
    assert counts.ok
    if counts.interaction_span_surjective:
        assert counts.equalities_hold


@given(seeds)
def test_bi_level_relations_hold(seed):
    rng = np.random.default_rng(seed)
    net, F, _ = generators.random_zero_deficiency_system(rng)
    candidates = [linkage_class_decomposition(net), make_decomposition(net, generators.random_partition(rng, net.r))]
    for D in candidates:
        if not all(is_cycle_terminal(net, b) for b in D.blocks):
            continue
        ind = induced_decomposition(net, F, D)
        assert all(ind.relations.values())
        if ind.is_decomposition and ind.equal_flux_dims and is_independent(net, D.blocks):
            assert ind.bi_level_independent
