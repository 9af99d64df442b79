"""Time heuristic versus uniform-random rollouts from the empty schedule.

Prints microseconds per rollout for each size and rule, and the ratio of
the heuristic cost to the random cost.
"""

import argparse
import time

import numpy as np

from jssp_mcts.instance import generate_instance
from jssp_mcts.rules import DispatchRule
from jssp_mcts.schedule import PartialSchedule
from jssp_mcts.solvers import rollout_heuristic, rollout_random


def per_rollout(fn, ps, reps):
    for _ in range(max(reps // 5, 1)):  # warm up: compilation and caches
        fn(ps)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(ps)
    return (time.perf_counter() - t0) / reps * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="6x6,10x10,14x14,20x20")
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'size':<7} {'rollout':<8} {'us':>9} {'ratio':>6}")
    for token in args.sizes.split(","):
        n, m = (int(v) for v in token.split("x"))
        ps = PartialSchedule(generate_instance(n, m, seed=1))
        base = per_rollout(lambda s: rollout_random(s, rng), ps, args.reps)
        print(f"{token:<7} {'random':<8} {base:>9.1f} {1.0:>6.2f}")
        for rule in (DispatchRule.MWKR, DispatchRule.SPT, DispatchRule.LOPN):
            us = per_rollout(lambda s: rollout_heuristic(s, rule, rng), ps, args.reps)
            print(f"{token:<7} {rule.value:<8} {us:>9.1f} {us / base:>6.2f}")


if __name__ == "__main__":
    main()
