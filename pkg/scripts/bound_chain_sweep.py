#!/usr/bin/env python3
"""Sweep the bound chain over seeded random networks.

For each instance prints the link count, pair count, acyclic maximum,
packing value, approximate feedback weight and exact staged GNS cut, then
summarizes the worst approximation ratio observed. Everything is exact
arithmetic; the run is reproducible from the seed.
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from gnskit import (
    min_gns_cut_exact,
    rcp_exact,
    subset_fes_approx,
    tilde_transform,
    to_index_graph,
)
from gnskit.bounds import mais_exact
from gnskit.instances import random_dag_network


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=30)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--max-links", type=int, default=14)
    args = parser.parse_args()

    print(f"{'seed':>6} {'m':>3} {'k':>2} {'mais':>4} {'rcp':>6} {'approx':>6} {'gns~':>4}")
    worst = Fraction(0)
    collected = 0
    seed = args.seed - 1
    while collected < args.count:
        seed += 1
        k = 1 + (seed % 4)
        try:
            net = random_dag_network(4 + seed % 4, 3 + seed % 6, k, seed=seed)
        except ValueError:
            continue
        if net.m > args.max_links:
            continue
        collected += 1
        g, _ = to_index_graph(net)
        mais_value = mais_exact(g)[0]
        rcp = rcp_exact(g)
        approx = subset_fes_approx(net)
        gns = min_gns_cut_exact(tilde_transform(net))
        assert rcp.value <= net.m - mais_value <= approx.diagnostics.weight
        assert net.m - mais_value == len(gns.cut)
        if rcp.value > 0:
            worst = max(worst, Fraction(approx.diagnostics.weight) / rcp.value)
        print(
            f"{seed:>6} {net.m:>3} {net.k:>2} {mais_value:>4} "
            f"{str(rcp.value):>6} {approx.diagnostics.weight:>6} {len(gns.cut):>4}"
        )
    print(f"\nchain held on all {collected} instances; worst approx/rcp = {worst}")


if __name__ == "__main__":
    main()
