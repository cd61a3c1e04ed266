"""Acceptance criteria, one test each, with a PASS/FAIL line in the terminal summary."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from plkdecomp import generators
from plkdecomp.cycles import enumerate_cycles_through
from plkdecomp.decomposition import coarsen, is_coarsening, make_decomposition, profile
from plkdecomp.equilibria import (
    apply_main_theorem,
    certify_block_plp,
    corollary_check,
    find_equilibrium_numeric,
    parametrize_equilibria,
)
from plkdecomp.independence import finest_independent
from plkdecomp.io import load_fixture
from plkdecomp.kinetic_complexes import induced_decomposition, kinetic_network
from plkdecomp.kinetics import classify_nodes, mass_action_orders, nf_nodes, reaction_rates, sfrf_eval
from plkdecomp.linalg import orthogonal_complement
from plkdecomp.network import degree_profile, is_eulerian, summarize
from plkdecomp.search import verify_wr_cf, wr_cf_search, wr_cf_single
from plkdecomp.decomposition import linkage_class_decomposition

from .oracles import brute_wr_cf_exists, dfs_cycles_through, exact_rank, independent_two_block_partitions

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    assert ok, detail


def labels(i, j, prefix="r"):
    return [f"{prefix}{x}" for x in range(i, j + 1)]


def node(net, name):
    return next(y for y in range(net.n) if net.complex_name(y) == name)


def test_criterion_01_schmitz_summary():
    doc = load_fixture("schmitz.crn")
    net, F = doc.network, doc.F
    s = summarize(net)
    nf = {net.complex_name(y): [[net.labels[j] for j in sub] for sub in nc.cf_subsets]
          for y, nc in classify_nodes(net, F).items() if nc.is_nf}
    ok = ((s.n, s.l, s.s, s.delta, s.weakly_reversible) == (6, 1, 5, 0, True)
          and nf == {"M1": [["r2"], ["r5", "r9"]], "M2": [["r8"], ["r10", "r13"]], "M3": [["r6"], ["r12"]]})
    record(1, ok, f"n={s.n} l={s.l} s={s.s} delta={s.delta} WR={s.weakly_reversible} NF={nf}")


def test_criterion_02_schmitz_given_decomposition():
    doc = load_fixture("schmitz.crn")
    net, F = doc.network, doc.F
    D = make_decomposition(net, [labels(1, 4), labels(5, 8), labels(9, 13)])
    ok_wr, _ = verify_wr_cf(net, F, D)
    p = profile(net, D)
    cd = {net.complex_name(c) for c in p.common_complexes}
    record(2, ok_wr and p.zdd and cd == {"M1", "M2", "M3", "M4"}, f"WR-CF={ok_wr} ZDD={p.zdd} C_D={sorted(cd)}")


def test_criterion_03_schmitz_sub_search():
    doc = load_fixture("schmitz_sub.crn")
    net, F = doc.network, doc.F
    want = [labels(1, 4), labels(5, 8)]
    ex = wr_cf_search(net, F, "exhaustive")
    gr = wr_cf_search(net, F, "greedy")
    p = profile(net, ex.decomposition)
    ok = (ex.blocks_as_labels() == want and gr.blocks_as_labels() == want and p.independent
          and p.block_ranks == (2, 3) and p.s == 5 and p.bi_independent and len(p.common_complexes) <= 1)
    record(3, ok, f"exhaustive={ex.blocks_as_labels()} greedy={gr.blocks_as_labels()} ranks={p.block_ranks} "
                  f"bi-independent={p.bi_independent} |C_D|={len(p.common_complexes)}")


def test_criterion_04_schmitz_sub_kinetic_complexes():
    doc = load_fixture("schmitz_sub.crn")
    net, F = doc.network, doc.F
    kn = kinetic_network(net, F)
    ind = induced_decomposition(net, F, make_decomposition(net, [labels(1, 4), labels(5, 8)]))
    s = summarize(net)
    ok = ((kn.n, kn.l, kn.s, kn.deficiency) == (7, 1, 6, 0)
          and (ind.n_tilde, ind.l_tilde, ind.s_tilde) == (7, 2, 5)
          and ind.n_tilde - ind.l_tilde == s.n - s.l == 5 and ind.deficiency == s.delta == 0)
    record(4, ok, f"kinetic n,l,s,delta={kn.n},{kn.l},{kn.s},{kn.deficiency}; "
                  f"induced n,l,s={ind.n_tilde},{ind.l_tilde},{ind.s_tilde}")


def test_criterion_05_example4():
    doc = load_fixture("example4.crn")
    net, F = doc.network, doc.F
    x1 = node(net, "X1")
    enum = enumerate_cycles_through(net, F, x1)
    got = [{frozenset(net.labels[a] for a in c.arcs) for c in g} for g in enum.by_cf]
    want = [{frozenset(labels(1, 4, "R")), frozenset({"R1", "R7", "R8"})},
            {frozenset({"R5", "R6", "R7", "R8"}), frozenset({"R5", "R6", "R2", "R3", "R4"}), frozenset({"R5", "R9"})}]
    res = wr_cf_single(net, F, x1)
    ok = (not is_eulerian(net) and degree_profile(net, x1) == (3, 2) and got == want
          and res.blocks_as_labels() == [labels(1, 4, "R"), labels(5, 9, "R")])
    record(5, ok, f"eulerian={is_eulerian(net)} deg(X1)={degree_profile(net, x1)} "
                  f"cycles={[len(g) for g in got]} blocks={res.blocks_as_labels()}")


def test_criterion_06_schmitz_sub_plp():
    doc = load_fixture("schmitz_sub.crn")
    net, F = doc.network, doc.F
    D = make_decomposition(net, [labels(1, 4), labels(5, 8)])
    certs = [certify_block_plp(net, F, b) for b in D.blocks]
    main = apply_main_theorem(net, F, D, certs)
    cor = corollary_check(net, F, D, certs)
    dims = [c.P.dim if c.plp else None for c in certs]
    perp = orthogonal_complement(main.P_E) if main.P_E is not None else None
    ok = (all(c.plp for c in certs) and dims == [2, 3] and main.applicable and cor.applicable
          and main.P_E.dim == 5 and perp.dim == 1)
    record(6, ok, f"certificate dims={dims} theorem={main.applicable} corollary={cor.applicable} "
                  f"dim P_E={main.P_E.dim if main.P_E else None} dim P_E^perp={perp.dim if perp else None}")


def test_criterion_07_cycle_oracle():
    mismatches = 0
    for seed in range(200):
        net = generators.random_digraph(np.random.default_rng(seed), max_vertices=8, max_arcs=14)
        F = mass_action_orders(net)
        for y in range(net.n):
            enum = enumerate_cycles_through(net, F, y)
            ours = [c.arcs for c in enum.cycles]
            if enum.truncated or len(ours) != len(set(ours)) or set(ours) != dfs_cycles_through(net, y):
                mismatches += 1
    record(7, mismatches == 0, f"200 digraphs, {mismatches} anchors disagree with DFS")


def test_criterion_08_single_nf_search():
    disagree = invalid = found = 0
    for seed in range(100):
        net, F = generators.random_single_nf(np.random.default_rng(seed), max_reactions=9)
        res = wr_cf_single(net, F, nf_nodes(net, F)[0])
        found += res.found
        disagree += res.found != brute_wr_cf_exists(net, F)
        if res.found and not verify_wr_cf(net, F, res.decomposition)[0]:
            invalid += 1
    record(8, disagree == 0 and invalid == 0,
           f"100 instances, {found} with a decomposition, {disagree} disagree with brute force, {invalid} invalid")


def test_criterion_09_independence():
    bad_rank = bad_flag = bad_coarse = 0
    for seed in range(100):
        net = generators.random_network(np.random.default_rng(seed), max_reactions=8)
        fi = finest_independent(net)
        total = exact_rank(list(net.reaction_vectors), net.m)
        if sum(exact_rank([net.reaction_vectors[j] for j in b], net.m) for b in fi.decomposition.blocks) != total:
            bad_rank += 1
        bad_flag += fi.nontrivial == fi.graph.connected
        for a, b in independent_two_block_partitions(net):
            if not is_coarsening(fi.decomposition, make_decomposition(net, [a, b])):
                bad_coarse += 1
    record(9, bad_rank == bad_flag == bad_coarse == 0,
           f"100 networks: rank failures {bad_rank}, flag failures {bad_flag}, non-coarsenings {bad_coarse}")


def test_criterion_10_decomposition_relations():
    violations = checked = 0
    for seed in range(300):
        rng = np.random.default_rng(seed)
        net = generators.random_network(rng) if seed % 2 else generators.random_digraph(rng, 6, 9)
        D = make_decomposition(net, generators.random_partition(rng, net.r))
        variants = [D] + ([coarsen(D, [list(rng.permutation(D.k)[: int(rng.integers(2, D.k + 1))])])]
                          if D.k > 1 else [])
        whole = summarize(net)
        for E in variants:
            checked += 1
            try:
                p = profile(net, E)
            except ArithmeticError:
                violations += 1
                continue
            sd = sum(p.block_deficiencies)
            eq = whole.delta == sd
            ok = ((not p.independent or whole.delta <= sd)
                  and (not p.incidence_independent or whole.delta >= sd)
                  and (len(p.common_complexes) > 1 or p.incidence_independent)
                  and (p.independent and eq) == (p.incidence_independent and eq) == p.bi_independent
                  and (whole.delta != 0 or p.incidence_independent == (p.independent and p.zdd) == p.bi_independent))
            if E is not D:
                q = profile(net, D)
                ok = ok and (not q.independent or p.independent) and (not q.incidence_independent
                                                                      or p.incidence_independent)
            violations += not ok
    record(10, violations == 0, f"{checked} decompositions checked, {violations} violations")


def test_criterion_11_numeric():
    worst_root = worst_sample = worst_sample_abs = worst_coset = 0.0
    failures = stalled = 0
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        net, F, k = generators.random_zero_deficiency_system(rng, max_species=4)
        rep = apply_main_theorem(net, F, linkage_class_decomposition(net))
        if not rep.applicable:
            failures += 1
            continue
        guesses = [np.ones(net.m)] + [np.exp(rng.normal(size=net.m)) for _ in range(9)]
        x = find_equilibrium_numeric(net, F, k, guesses)
        if x is None:
            failures += 1
            continue
        worst_root = max(worst_root, float(np.max(np.abs(sfrf_eval(net, F, k, x)))
                                         / reaction_rates(net, F, k, x).sum()))
        fam = parametrize_equilibria(rep, x, net, F, k)
        for _ in range(50):
            p = fam.sample(rng)
            res = float(np.max(np.abs(sfrf_eval(net, F, k, p))))
            worst_sample_abs = max(worst_sample_abs, res)
            worst_sample = max(worst_sample, res / reaction_rates(net, F, k, p).sum())
        # one equilibrium per positive coset: every start that converges must land on the same point
        x0 = np.exp(rng.normal(size=net.m))
        starts = [x0] + [np.exp(rng.normal(size=net.m)) for _ in range(4)]
        sols = [find_equilibrium_numeric(net, F, k, [s], coset=(rep.P_E, x0)) for s in starts]
        sols = [s for s in sols if s is not None]
        stalled += len(starts) - len(sols)
        if len(sols) < 2 or not all(fam.contains(s, tol=1e-8) for s in sols):
            failures += 1
            continue
        worst_coset = max(worst_coset, max(float(np.max(np.abs(s - sols[0]) / np.maximum(1.0, sols[0])))
                                           for s in sols))
    ok = failures == 0 and worst_root < 1e-10 and worst_sample < 1e-8 and worst_sample_abs < 1e-8 and worst_coset < 1e-6
    record(11, ok, f"20 systems, failures {failures}, root residual {worst_root:.2e}, sample residual "
                   f"{worst_sample:.2e} (absolute {worst_sample_abs:.2e}), coset difference {worst_coset:.2e} "
                   f"({stalled} of 100 coset starts stalled)")
