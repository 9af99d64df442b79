"""Greedy, Pilot and MCS solvers behind a single :func:`solve` entry point.

Each solve owns one ``numpy.random.Generator`` (PCG64) seeded from
``SolverConfig.seed``. Draws happen in program order: tree descent draws
(see :mod:`jssp_mcts.search_tree`), then one uniform per operation
completed by the rollout, walk after walk. Identical instance, config and
seed therefore give an identical solution.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field

import numpy as np

from ..instance import Instance
from ..rules import DispatchRule
from ..schedule import MODES, Solution
from ..search_tree import SearchNode
from .greedy import greedy_solve
from .mcs import DEFAULT_EPSILON, mcs_search, mcs_solve
from .pilot import pilot_search, pilot_solve
from .rollout import rollout_heuristic, rollout_random

__all__ = [
    "Algorithm",
    "RunResult",
    "SolverConfig",
    "greedy_solve",
    "mcs_search",
    "mcs_solve",
    "pilot_search",
    "pilot_solve",
    "rollout_heuristic",
    "rollout_random",
    "solve",
]


class Algorithm(enum.Enum):
    GREEDY = "greedy"
    PILOT = "pilot"
    MCS = "mcs"

    @classmethod
    def parse(cls, name: str | Algorithm) -> Algorithm:
        if isinstance(name, cls):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown algorithm {name!r}; expected greedy|pilot|mcs") from None


@dataclass(frozen=True)
class SolverConfig:
    algorithm: Algorithm
    rule: DispatchRule | None = DispatchRule.MWKR
    budget: int = 1000
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    mode: str = "insertion"
    trace_every: int = 0
    halt_when_exhausted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        if self.rule is not None:
            object.__setattr__(self, "rule", DispatchRule.parse(self.rule))
        if self.algorithm is not Algorithm.MCS and self.rule is None:
            raise ValueError(f"{self.algorithm.value} needs a dispatch rule")
        if self.algorithm is not Algorithm.GREEDY and self.budget < 1:
            raise ValueError("budget must be >= 1")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")

    @property
    def label(self) -> str:
        if self.algorithm is Algorithm.GREEDY:
            return f"greedy({self.rule.value})"
        if self.algorithm is Algorithm.PILOT:
            return f"pilot({self.rule.value},{self.budget})"
        return f"mcs(eps={self.epsilon:g},{self.budget})"


@dataclass
class RunResult:
    solution: Solution
    rollouts: int
    seconds: float
    trace: list[tuple[int, int]] = field(default_factory=list)
    rollout_seconds: float = 0.0
    root: SearchNode | None = None


def solve(inst: Instance, config: SolverConfig, keep_tree: bool = False) -> RunResult:
    rng = np.random.default_rng(config.seed)
    if config.algorithm is Algorithm.GREEDY:
        t0 = time.perf_counter()
        sol = greedy_solve(inst, config.rule, rng, config.mode)
        return RunResult(sol, 0, time.perf_counter() - t0, [(0, sol.makespan)])
    opts = dict(mode=config.mode, trace_every=config.trace_every, halt_when_exhausted=config.halt_when_exhausted)
    if config.algorithm is Algorithm.PILOT:
        res = pilot_search(inst, config.rule, config.budget, rng, **opts)
    else:
        res = mcs_search(inst, config.budget, config.epsilon, rng, **opts)
    return RunResult(
        solution=Solution.from_sequence(inst, res.best_seq, config.mode),
        rollouts=res.rollouts,
        seconds=res.seconds,
        trace=res.trace,
        rollout_seconds=res.rollout_seconds,
        root=res.root if keep_tree else None,
    )
