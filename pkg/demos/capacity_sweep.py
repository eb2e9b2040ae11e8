"""Sweep total capacity from 1x to 3x the demand and watch A_min climb.

The same 50 requests meet a growing server pool (the generator keeps the
smaller pools as prefixes of the larger ones), so the effect of headroom
is isolated from instance noise. Averages over a handful of seeds.
"""

import numpy as np

from havnfp import GeneratorConfig, VnsConfig, greedy, sweep, vns
from havnfp.placement import InfeasibleError

MULTIPLIERS = (1.0, 1.5, 2.0, 2.5, 3.0)
SEEDS = range(5)


def solve_vns(instance):
    try:
        _, report = vns(instance, VnsConfig())
    except InfeasibleError:
        _, report = vns(instance, VnsConfig(split=True))
    return report.objective


def solve_greedy(instance):
    try:
        placement = greedy(instance, "bestavail")
    except InfeasibleError:
        placement = greedy(instance, "bestavail", split=True)
    return placement.evaluate().objective


def main():
    vns_rows = []
    greedy_rows = []
    for seed in SEEDS:
        instances = sweep(
            GeneratorConfig(requests=50, aps_per_request=2, seed=seed), MULTIPLIERS
        )
        vns_rows.append([solve_vns(i) for i in instances])
        greedy_rows.append([solve_greedy(i) for i in instances])

    vns_mean = np.mean(vns_rows, axis=0)
    greedy_mean = np.mean(greedy_rows, axis=0)

    print(f"{'multiplier':>10} {'greedy A_min':>14} {'vns A_min':>14} {'gap':>10}")
    for m, g, v in zip(MULTIPLIERS, greedy_mean, vns_mean):
        print(f"{m:>10.2f} {g:>14.7f} {v:>14.7f} {v - g:>10.2e}")


if __name__ == "__main__":
    main()
