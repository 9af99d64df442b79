"""Best-so-far makespan against rollouts for Pilot and MCS on a few instances.

Writes a long-format CSV (instance, method, rollouts, best) for plotting.
"""

import argparse
import csv
import sys

from jssp_mcts.harness import instance_seed
from jssp_mcts.instance import generate_instance
from jssp_mcts.solvers import SolverConfig, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", default="10x10")
    ap.add_argument("--instances", type=int, default=5)
    ap.add_argument("--budget", type=int, default=5000)
    ap.add_argument("--every", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    n, m = (int(v) for v in args.size.split("x"))
    methods = [SolverConfig("pilot", rule=r, budget=args.budget) for r in ("mwkr", "spt", "lopn")]
    methods.append(SolverConfig("mcs", rule=None, budget=args.budget))

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["instance", "method", "rollouts", "best"])
    for k in range(args.instances):
        inst = generate_instance(n, m, seed=instance_seed(args.seed, (n, m), k))
        for cfg in methods:
            run = SolverConfig(cfg.algorithm, cfg.rule, cfg.budget, cfg.epsilon, seed=k, trace_every=args.every)
            for done, best in solve(inst, run).trace:
                w.writerow([k, cfg.label, done, best])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
