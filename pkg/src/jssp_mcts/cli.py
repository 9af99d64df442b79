"""Command line entry point: ``gen``, ``solve``, ``exact`` and ``bench``.

Jobs and machines are printed 1-based, as in instance files. Output of
``solve`` carries no timing unless ``--timing`` is given, so repeated calls
with the same arguments print identical bytes.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .exact import TooLargeError, branch_and_bound, enumerate_optimal
from .instance import InstanceFormatError, generate_instance, load_instance, save_instance
from .schedule import MODES, solution_csv, verify_schedule
from .search_tree import dump_tree
from .solvers import SolverConfig, solve

EXIT_INVALID = 3


def _cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    size = (args.jobs, args.machines)
    for k in range(args.count):
        seed = harness.instance_seed(args.seed, size, k)
        inst = generate_instance(args.jobs, args.machines, args.pmin, args.pmax, seed=seed)
        path = out / f"{args.jobs}x{args.machines}_{k:03d}.txt"
        save_instance(inst, path)
        print(path)
    return 0


def _format_starts(starts) -> list[str]:
    return [f"  job {j + 1}: " + " ".join(str(s) for s in row) for j, row in enumerate(starts)]


def _cmd_solve(args) -> int:
    inst = load_instance(args.file)
    cfg = SolverConfig(
        args.algo,
        rule=args.rule,
        budget=args.budget,
        epsilon=args.epsilon,
        seed=args.seed,
        mode=args.mode,
    )
    res = solve(inst, cfg, keep_tree=args.dump_tree is not None)
    sol = res.solution
    bad = verify_schedule(inst, sol.starts)
    lines = [
        f"instance: {inst.n}x{inst.m}",
        f"algorithm: {cfg.label}",
        f"seed: {cfg.seed}",
        f"makespan: {sol.makespan}",
        f"rollouts: {res.rollouts}",
        "sequence: " + " ".join(str(j + 1) for j in sol.seq),
        "starts:",
        *_format_starts(sol.starts),
    ]
    if args.trace:
        lines.append("trace: " + " ".join(f"{k}:{v}" for k, v in res.trace))
    if args.timing:
        lines.append(f"seconds: {res.seconds:.4f}")
    print("\n".join(lines))
    if args.csv:
        Path(args.csv).write_text(solution_csv(inst, sol))
    if args.dump_tree:
        Path(args.dump_tree).write_text(json.dumps(dump_tree(res.root, args.tree_depth), indent=1) + "\n")
    if bad is not None:
        print(f"error: invalid schedule: {bad}", file=sys.stderr)
        return EXIT_INVALID
    return 0


def _cmd_exact(args) -> int:
    inst = load_instance(args.file)
    if args.method == "enum":
        res = enumerate_optimal(inst)
    else:
        res = branch_and_bound(inst, time_limit=args.time_limit)
    bad = verify_schedule(inst, res.schedule.starts)
    print(f"makespan: {res.makespan}")
    print(f"proven: {str(res.proven_optimal).lower()}")
    print(f"nodes: {res.nodes_explored}")
    print(f"time: {res.seconds:.3f}s")
    if bad is not None or res.schedule.makespan != res.makespan:
        print(f"error: invalid witness: {bad}", file=sys.stderr)
        return EXIT_INVALID
    return 0


def _cmd_bench(args) -> int:
    cfg = harness.ExperimentConfig.from_json(args.config)
    try:
        result = harness.run_experiment(cfg, workers=args.jobs_parallel)
    except harness.HarnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = harness.write_outputs(result, args.out)
    print(harness.format_table(result), end="")
    print(f"results written to {out}")
    problems = harness.check_runs(result)
    for msg in problems:
        print(f"error: {msg}", file=sys.stderr)
    return EXIT_INVALID if problems else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jssp-mcts", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--jobs", type=int, required=True)
    g.add_argument("--machines", type=int, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--pmin", type=int, default=1)
    g.add_argument("--pmax", type=int, default=200)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("file")
    s.add_argument("--algo", choices=["greedy", "pilot", "mcs"], required=True)
    s.add_argument("--rule", type=str.lower, choices=["mwkr", "spt", "lopn", "random"], default=None)
    s.add_argument("--budget", type=int, default=1000)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=MODES, default="insertion")
    s.add_argument("--csv", help="write the schedule as CSV")
    s.add_argument("--dump-tree", help="write the search tree as JSON")
    s.add_argument("--tree-depth", type=int, default=3)
    s.add_argument("--trace", action="store_true", help="print the best-so-far trace")
    s.add_argument("--timing", action="store_true", help="print wall time")
    s.set_defaults(func=_cmd_solve)

    e = sub.add_parser("exact", help="optimal makespan of one instance file")
    e.add_argument("file")
    e.add_argument("--time-limit", type=float, default=60.0)
    e.add_argument("--method", choices=["bnb", "enum"], default="bnb")
    e.set_defaults(func=_cmd_exact)

    b = sub.add_parser("bench", help="run an experiment grid from a JSON config")
    b.add_argument("--config", required=True)
    b.add_argument("--out", default="results")
    b.add_argument("--jobs-parallel", type=int, default=1)
    b.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.command == "solve":
        if args.algo == "mcs":
            args.rule = None
        elif args.rule is None:
            args.rule = "mwkr"
    try:
        return args.func(args)
    except (InstanceFormatError, TooLargeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
