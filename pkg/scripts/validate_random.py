"""Randomized cross-checks of the search and independence routines against brute force.

Usage: python scripts/validate_random.py [--instances 200] [--seed 0]
Run from the repository root so that the test oracles are importable.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from plkdecomp import generators
from plkdecomp.decomposition import is_coarsening, make_decomposition
from plkdecomp.independence import finest_independent, independent_wr_cf
from plkdecomp.kinetics import nf_nodes
from plkdecomp.search import wr_cf_search, wr_cf_single
from tests.oracles import brute_independent_wr_cf_exists, brute_wr_cf_exists, independent_two_block_partitions


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    counts = {"single": [0, 0, 0], "multi": [0, 0, 0], "independent": [0, 0, 0], "finest": [0, 0]}
    t0 = time.perf_counter()
    for _ in range(args.instances):
        net, F = generators.random_single_nf(rng)
        ex = wr_cf_single(net, F, nf_nodes(net, F)[0]).found
        gr = wr_cf_single(net, F, nf_nodes(net, F)[0], "greedy").found
        truth = brute_wr_cf_exists(net, F)
        counts["single"][0] += truth
        counts["single"][1] += ex != truth
        counts["single"][2] += truth and not gr

        net, F = generators.random_multi_nf(rng)
        truth = brute_wr_cf_exists(net, F)
        counts["multi"][0] += truth
        counts["multi"][1] += wr_cf_search(net, F).found != truth
        counts["multi"][2] += truth and not wr_cf_search(net, F, "greedy").found

        truth = brute_independent_wr_cf_exists(net, F)
        counts["independent"][0] += truth
        counts["independent"][1] += independent_wr_cf(net, F).found != truth

        net = generators.random_network(rng)
        fi = finest_independent(net).decomposition
        counts["finest"][0] += fi.k > 1
        counts["finest"][1] += any(not is_coarsening(fi, make_decomposition(net, list(p)))
                                   for p in independent_two_block_partitions(net))
    n = args.instances
    print(f"{n} instances per family, {time.perf_counter() - t0:.1f}s")
    for fam in ("single", "multi"):
        yes, bad, missed = counts[fam]
        print(f"  {fam}-NF: {yes} decomposable, exhaustive disagreements {bad}, greedy misses {missed}")
    yes, bad = counts["independent"][:2]
    print(f"  independent WR CF: {yes} exist, disagreements {bad}")
    print(f"  finest independent: {counts['finest'][0]} nontrivial, non-coarsening violations {counts['finest'][1]}")


if __name__ == "__main__":
    main()
