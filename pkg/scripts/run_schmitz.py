"""Full analysis of the carbon-cycle model and its eight-reaction subnetwork.

Usage: python scripts/run_schmitz.py [--seed 0]
"""

from __future__ import annotations

import argparse

import numpy as np

from plkdecomp.decomposition import make_decomposition, profile
from plkdecomp.equilibria import apply_main_theorem, certify_block_plp, find_equilibrium_numeric, parametrize_equilibria
from plkdecomp.independence import finest_independent, independent_wr_cf
from plkdecomp.io import load_fixture
from plkdecomp.kinetic_complexes import induced_decomposition, kinetic_network
from plkdecomp.kinetics import classify_nodes, sfrf_eval
from plkdecomp.linalg import orthogonal_complement
from plkdecomp.network import summarize
from plkdecomp.search import wr_cf_search


def show_network(title: str, doc) -> None:
    net, F = doc.network, doc.F
    s = summarize(net)
    print(f"== {title}")
    print(f"   n={s.n} l={s.l} s={s.s} deficiency={s.delta} weakly reversible={s.weakly_reversible}")
    for y, nc in classify_nodes(net, F).items():
        if nc.is_nf:
            subsets = " / ".join("{" + ",".join(net.labels[j] for j in sub) + "}" for sub in nc.cf_subsets)
            print(f"   NF node {net.complex_name(y)}: {subsets}")
    for mode in ("greedy", "exhaustive"):
        res = wr_cf_search(net, F, mode)
        print(f"   WR CF search ({mode}): {res.outcome} {res.blocks_as_labels() or ''}")
    res = independent_wr_cf(net, F)
    print(f"   independent WR CF search: {res.outcome} {res.blocks_as_labels() or ''}")
    print(f"   finest independent decomposition: {finest_independent(net).decomposition.as_labels()}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    full = load_fixture("schmitz.crn")
    show_network("full model", full)
    D = make_decomposition(full.network, [[f"r{i}" for i in a] for a in ((1, 2, 3, 4), (5, 6, 7, 8),
                                                                          (9, 10, 11, 12, 13))])
    p = profile(full.network, D)
    print(f"   three-block split: ZDD={p.zdd} common complexes="
          f"{[full.network.complex_name(c) for c in p.common_complexes]}")

    sub = load_fixture("schmitz_sub.crn")
    net, F = sub.network, sub.F
    show_network("subnetwork r1-r8", sub)
    D = make_decomposition(net, [[f"r{i}" for i in range(1, 5)], [f"r{i}" for i in range(5, 9)]])
    p = profile(net, D)
    print(f"   block ranks {p.block_ranks}, bi-independent={p.bi_independent}, kind={p.kind}")
    kn = kinetic_network(net, F)
    ind = induced_decomposition(net, F, D)
    print(f"   kinetic complexes: n={kn.n} l={kn.l} s={kn.s} deficiency={kn.deficiency}")
    print(f"   induced: n={ind.n_tilde} l={ind.l_tilde} s={ind.s_tilde} bi-level independent={ind.bi_level_independent}")
    certs = [certify_block_plp(net, F, b) for b in D.blocks]
    rep = apply_main_theorem(net, F, D, certs)
    perp = orthogonal_complement(rep.P_E)
    print(f"   block certificates: {[(c.kind, c.P.dim) for c in certs]}")
    print(f"   equilibria space dim {rep.P_E.dim}, complement spanned by "
          f"({', '.join(str(x) for x in perp.basis[0])})")

    rng = np.random.default_rng(args.seed)
    k = np.exp(rng.normal(size=net.r))
    x = find_equilibrium_numeric(net, F, k, [np.ones(net.m)])
    fam = parametrize_equilibria(rep, x, net, F, k)
    worst = max(float(np.max(np.abs(sfrf_eval(net, F, k, fam.sample(rng))))) for _ in range(100))
    print(f"   random rates: reference equilibrium {np.round(x, 6)}; worst residual over 100 samples {worst:.2e}")


if __name__ == "__main__":
    main()
