"""Experiment grid: instance sets, solver cells, normalization and statistics.

One task per instance runs every cell (and repeat) on it, then computes the
instance's reference makespan. Tasks may run in worker processes; results
are collected in task order, so every output file except ``timings.csv``
is independent of the degree of parallelism.

Seeds are derived from ``master_seed`` with ``numpy.random.SeedSequence``
spawn keys: instance seeds from (size, index), run seeds from (cell label,
size, index, repeat). No run shares a random stream with another.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .exact import branch_and_bound
from .instance import Instance, generate_instance
from .schedule import MODES, Solution, verify_schedule
from .solvers import Algorithm, SolverConfig, solve

log = logging.getLogger(__name__)

NORMALIZATIONS = ("exact", "best_found")
OPT_SLACK = 1e-9

# spawn-key tags keep instance, run and reference streams apart
_INSTANCE_KEY, _RUN_KEY, _REFERENCE_KEY = 0, 1, 2


class HarnessError(RuntimeError):
    """A solution failed validation or undercut a proven optimum."""


@dataclass
class ExperimentConfig:
    sizes: list[tuple[int, int]]
    instances_per_size: int = 100
    budgets: list[int] = field(default_factory=lambda: [100, 1000, 5000])
    algorithms: list[str] = field(default_factory=lambda: ["greedy", "pilot", "mcs"])
    rules: list[str] = field(default_factory=lambda: ["mwkr", "spt", "lopn"])
    epsilon: float = 0.1
    master_seed: int = 0
    normalization: str = "exact"
    repeats: int = 1
    exact_time_limit: float = 60.0
    reference_budget: int = 0  # extra long MCS run folded into best_found
    mode: str = "insertion"
    p_min: int = 1
    p_max: int = 200
    name: str = "experiment"

    def __post_init__(self):
        self.sizes = [tuple(int(v) for v in s) for s in self.sizes]
        self.budgets = [int(b) for b in self.budgets]
        self.algorithms = [Algorithm.parse(a).value for a in self.algorithms]
        self.rules = [r.lower() for r in self.rules]
        if not self.sizes or not self.algorithms:
            raise ValueError("experiment grid is empty")
        if any(len(s) != 2 or min(s) < 1 for s in self.sizes):
            raise ValueError(f"sizes must be (jobs, machines) pairs >= 1, got {self.sizes}")
        if self.instances_per_size < 1 or self.repeats < 1:
            raise ValueError("instances_per_size and repeats must be >= 1")
        needs_budget = any(a != "greedy" for a in self.algorithms)
        if needs_budget and (not self.budgets or min(self.budgets) < 1):
            raise ValueError("tree search cells need budgets >= 1")
        if any(a != "mcs" for a in self.algorithms) and not self.rules:
            raise ValueError("greedy and pilot cells need at least one rule")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        self.cells()  # validates rules and epsilon

    def cells(self) -> list[SolverConfig]:
        """Grid cells in report order; seeds are filled in per run."""
        out = []
        for algo in self.algorithms:
            if algo == "greedy":
                out += [SolverConfig(algo, rule=r, mode=self.mode) for r in self.rules]
            elif algo == "pilot":
                out += [SolverConfig(algo, rule=r, budget=b, mode=self.mode) for r in self.rules for b in self.budgets]
            else:
                out += [
                    SolverConfig(algo, rule=None, budget=b, epsilon=self.epsilon, mode=self.mode) for b in self.budgets
                ]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> ExperimentConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = [list(s) for s in self.sizes]
        return d


@dataclass(frozen=True)
class RunRecord:
    size: tuple[int, int]
    instance: int
    cell: str
    algorithm: str
    rule: str
    budget: int
    epsilon: float
    repeat: int
    seed: int
    makespan: int
    rollouts: int
    trace_ok: bool
    wall_ms: float = 0.0
    rollout_ms: float = 0.0


@dataclass(frozen=True)
class Reference:
    size: tuple[int, int]
    instance: int
    best_run: int
    reference_run: int | None
    exact: int | None
    proven: bool
    nodes: int


@dataclass(frozen=True)
class StatsRow:
    size: tuple[int, int]
    cell: str
    normalization: str
    count: int
    min: float
    mean: float
    median: float
    stdev: float
    max: float
    count_opt: int | None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["size"] = f"{self.size[0]}x{self.size[1]}"
        return d


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[StatsRow]
    runs: list[RunRecord]
    references: list[Reference]
    normalization: dict[tuple[int, int], str]
    notes: list[str]

    def row(self, size: tuple[int, int], cell: str) -> StatsRow:
        for r in self.rows:
            if r.size == tuple(size) and r.cell == cell:
                return r
        raise KeyError(f"no row for {cell} at {size}")

    def values(self, size: tuple[int, int], cell: str) -> list[float]:
        """Per-instance normalized makespans (mean over repeats)."""
        return _cell_values(self, tuple(size), cell)


def summarize(values: Sequence[float]) -> dict:
    if not values:
        raise ValueError("cannot summarize an empty list")
    v = [float(x) for x in values]
    return dict(
        count=len(v),
        min=min(v),
        mean=statistics.fmean(v),
        median=statistics.median(v),
        stdev=statistics.stdev(v) if len(v) > 1 else 0.0,
        max=max(v),
        count_opt=sum(x <= 1.0 + OPT_SLACK for x in v),
    )


def normalized_makespan(z: int, z_ref: int, exact: bool = False) -> float:
    """``z / z_ref``; under exact normalization ``z < z_ref`` is a hard error."""
    if z_ref < 1:
        raise ValueError(f"reference makespan must be >= 1, got {z_ref}")
    if exact and z < z_ref:
        raise HarnessError(f"makespan {z} beats the proven optimum {z_ref}")
    return z / z_ref


def instance_seed(master_seed: int, size: tuple[int, int], index: int) -> int:
    ss = np.random.SeedSequence(master_seed, spawn_key=(_INSTANCE_KEY, size[0], size[1], index))
    return int(ss.generate_state(1, np.uint64)[0])


def run_seed(master_seed: int, cell: str, size: tuple[int, int], index: int, repeat: int) -> int:
    key = (_RUN_KEY, zlib.crc32(cell.encode()), size[0], size[1], index, repeat)
    return int(np.random.SeedSequence(master_seed, spawn_key=key).generate_state(1, np.uint64)[0])


def make_instances(cfg: ExperimentConfig, size: tuple[int, int]) -> list[Instance]:
    n, m = size
    return [
        generate_instance(n, m, cfg.p_min, cfg.p_max, seed=instance_seed(cfg.master_seed, size, k))
        for k in range(cfg.instances_per_size)
    ]


def _check(inst: Instance, sol: Solution, what: str) -> None:
    bad = verify_schedule(inst, sol.starts)
    if bad is not None:
        raise HarnessError(f"{what}: invalid schedule ({bad})")
    if sol.makespan < inst.trivial_lower_bound():
        raise HarnessError(f"{what}: makespan {sol.makespan} below the trivial lower bound")


def _trace_ok(trace: list[tuple[int, int]], budget: int, rollouts: int, greedy: bool) -> bool:
    values = [v for _, v in trace]
    monotone = all(a >= b for a, b in zip(values, values[1:]))
    return monotone and (greedy or (rollouts == budget and trace[-1][0] == budget))


def _solve_instance(task: tuple) -> tuple[list[RunRecord], Reference]:
    cfg, size, index, inst = task
    runs = []
    best: Solution | None = None
    for cell in cfg.cells():
        for rep in range(cfg.repeats):
            seed = run_seed(cfg.master_seed, cell.label, size, index, rep)
            res = solve(inst, replace(cell, seed=seed))
            sol = res.solution
            _check(inst, sol, f"{cell.label} on {size[0]}x{size[1]} #{index}")
            greedy = cell.algorithm is Algorithm.GREEDY
            runs.append(
                RunRecord(
                    size=size,
                    instance=index,
                    cell=cell.label,
                    algorithm=cell.algorithm.value,
                    rule=cell.rule.value if cell.rule else "",
                    budget=0 if greedy else cell.budget,
                    epsilon=cell.epsilon if cell.algorithm is Algorithm.MCS else math.nan,
                    repeat=rep,
                    seed=seed,
                    makespan=sol.makespan,
                    rollouts=res.rollouts,
                    trace_ok=_trace_ok(res.trace, cell.budget, res.rollouts, greedy),
                    wall_ms=res.seconds * 1e3,
                    rollout_ms=res.rollout_seconds * 1e3,
                )
            )
            if best is None or sol.makespan < best.makespan:
                best = sol
    reference_run = None
    if cfg.reference_budget > 0:
        seed = int(
            np.random.SeedSequence(cfg.master_seed, spawn_key=(_REFERENCE_KEY, size[0], size[1], index))
            .generate_state(1, np.uint64)[0]
        )
        ref = solve(inst, SolverConfig("mcs", rule=None, budget=cfg.reference_budget, epsilon=cfg.epsilon, seed=seed, mode=cfg.mode))
        _check(inst, ref.solution, f"reference run on {size[0]}x{size[1]} #{index}")
        reference_run = ref.solution.makespan
        if reference_run < best.makespan:
            best = ref.solution
    exact = None
    proven = False
    nodes = 0
    if cfg.normalization == "exact":
        er = branch_and_bound(inst, time_limit=cfg.exact_time_limit, incumbent=best)
        _check(inst, er.schedule, f"exact on {size[0]}x{size[1]} #{index}")
        exact, proven, nodes = er.makespan, er.proven_optimal, er.nodes_explored
    best_run = min(r.makespan for r in runs)
    return runs, Reference(size, index, best_run, reference_run, exact, proven, nodes)


def _reference_value(ref: Reference, mode: str) -> int:
    if mode == "exact":
        return ref.exact
    return min(v for v in (ref.best_run, ref.reference_run, ref.exact) if v is not None)


def _cell_values(result: ExperimentResult, size: tuple[int, int], cell: str) -> list[float]:
    mode = result.normalization[size]
    refs = {r.instance: r for r in result.references if r.size == size}
    per_instance: dict[int, list[float]] = {}
    for run in result.runs:
        if run.size == size and run.cell == cell:
            z_ref = _reference_value(refs[run.instance], mode)
            per_instance.setdefault(run.instance, []).append(
                normalized_makespan(run.makespan, z_ref, exact=mode == "exact")
            )
    return [statistics.fmean(per_instance[k]) for k in sorted(per_instance)]


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run the whole grid; ``workers > 1`` spreads instances over processes."""
    tasks = []
    for size in cfg.sizes:
        for index, inst in enumerate(make_instances(cfg, size)):
            tasks.append((cfg, size, index, inst))
    log.info("%s: %d instances x %d cells x %d repeats", cfg.name, len(tasks), len(cfg.cells()), cfg.repeats)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_solve_instance, tasks, chunksize=1))
    else:
        outputs = []
        for k, task in enumerate(tasks):
            outputs.append(_solve_instance(task))
            log.debug("instance %d/%d done", k + 1, len(tasks))
    runs = [r for rs, _ in outputs for r in rs]
    refs = [ref for _, ref in outputs]

    normalization = {}
    notes = []
    for size in cfg.sizes:
        mode = cfg.normalization
        if mode == "exact":
            unproven = [r.instance for r in refs if r.size == size and not r.proven]
            if unproven:
                mode = "best_found"
                notes.append(
                    f"WARNING {size[0]}x{size[1]}: exact normalization unavailable "
                    f"({len(unproven)} of {cfg.instances_per_size} instances unproven "
                    f"within {cfg.exact_time_limit:g} s); fell back to best_found"
                )
        normalization[size] = mode

    result = ExperimentResult(cfg, [], runs, refs, normalization, notes)
    for size in cfg.sizes:
        mode = normalization[size]
        for cell in cfg.cells():
            stats = summarize(_cell_values(result, size, cell.label))
            if mode != "exact":
                stats["count_opt"] = None
            result.rows.append(StatsRow(size=size, cell=cell.label, normalization=mode, **stats))
    return result


# output files


def raw_csv(result: ExperimentResult) -> str:
    """One row per run; no timing, so identical configs give identical bytes."""
    refs = {(r.size, r.instance): r for r in result.references}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["size", "instance", "algorithm", "rule", "budget", "epsilon", "repeat", "seed",
         "makespan", "reference", "normalization", "normalized", "rollouts"]
    )
    for run in result.runs:
        mode = result.normalization[run.size]
        z_ref = _reference_value(refs[(run.size, run.instance)], mode)
        w.writerow(
            [
                f"{run.size[0]}x{run.size[1]}",
                run.instance,
                run.algorithm,
                run.rule,
                run.budget,
                "" if math.isnan(run.epsilon) else f"{run.epsilon:g}",
                run.repeat,
                run.seed,
                run.makespan,
                z_ref,
                mode,
                f"{run.makespan / z_ref:.6f}",
                run.rollouts,
            ]
        )
    return buf.getvalue()


def timings_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "instance", "cell", "repeat", "wall_ms", "rollout_ms", "rollouts"])
    for run in result.runs:
        w.writerow(
            [f"{run.size[0]}x{run.size[1]}", run.instance, run.cell, run.repeat,
             f"{run.wall_ms:.3f}", f"{run.rollout_ms:.3f}", run.rollouts]
        )
    return buf.getvalue()


def references_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "instance", "best_run", "reference_run", "exact", "proven", "nodes"])
    for r in result.references:
        w.writerow(
            [f"{r.size[0]}x{r.size[1]}", r.instance, r.best_run,
             "" if r.reference_run is None else r.reference_run,
             "" if r.exact is None else r.exact, int(r.proven), r.nodes]
        )
    return buf.getvalue()


def format_table(result: ExperimentResult) -> str:
    header = f"{'size':<7} {'cell':<22} {'norm':<10} {'N':>4} {'min':>7} {'mean':>7} {'median':>7} {'stdev':>7} {'max':>7} {'#opt':>5}"
    lines = [header, "-" * len(header)]
    for r in result.rows:
        opt = "-" if r.count_opt is None else str(r.count_opt)
        lines.append(
            f"{r.size[0]}x{r.size[1]:<5} {r.cell:<22} {r.normalization:<10} {r.count:>4} "
            f"{r.min:>7.4f} {r.mean:>7.4f} {r.median:>7.4f} {r.stdev:>7.4f} {r.max:>7.4f} {opt:>5}"
        )
    lines += result.notes
    return "\n".join(lines) + "\n"


def summary_json(result: ExperimentResult) -> str:
    payload = {
        "config": result.config.to_dict(),
        "normalization": {f"{n}x{m}": v for (n, m), v in result.normalization.items()},
        "notes": result.notes,
        "rows": [r.as_dict() for r in result.rows],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_outputs(result: ExperimentResult, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "raw.csv").write_text(raw_csv(result))
    (out / "references.csv").write_text(references_csv(result))
    (out / "timings.csv").write_text(timings_csv(result))
    (out / "summary.txt").write_text(format_table(result))
    (out / "summary.json").write_text(summary_json(result))
    return out


def check_runs(result: ExperimentResult) -> list[str]:
    """Anytime and budget violations, as messages (empty when all runs pass)."""
    return [
        f"{r.cell} on {r.size[0]}x{r.size[1]} #{r.instance} rep {r.repeat}: bad trace or budget"
        for r in result.runs
        if not r.trace_ok
    ]
