"""Run one experiment grid from a JSON config and write its reports.

    python scripts/run_grid.py configs/grid_6x6.json --out results/6x6 --workers 4
"""

import argparse
import logging
import time

from jssp_mcts.harness import ExperimentConfig, check_runs, format_table, run_experiment, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", default=None)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--instances", type=int, default=None, help="override instances_per_size")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = ExperimentConfig.from_json(args.config)
    if args.instances:
        cfg.instances_per_size = args.instances
    t0 = time.perf_counter()
    result = run_experiment(cfg, workers=args.workers)
    elapsed = time.perf_counter() - t0
    out = write_outputs(result, args.out or f"results/{cfg.name}")
    print(format_table(result), end="")
    print(f"{elapsed:.1f}s, reports in {out}")
    for msg in check_runs(result):
        print("FAIL", msg)


if __name__ == "__main__":
    main()
