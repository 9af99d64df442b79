"""Greedy construction: dispatch by a priority rule until the schedule is complete."""

from __future__ import annotations

import numpy as np

from ..instance import Instance
from ..rules import DispatchRule, select
from ..schedule import PartialSchedule, Solution


def greedy_complete(ps: PartialSchedule, rule: DispatchRule, rng: np.random.Generator) -> PartialSchedule:
    while not ps.is_complete:
        ps.dispatch(select(rule, ps, rng))
    return ps


def greedy_solve(
    inst: Instance, rule: DispatchRule, rng: np.random.Generator, mode: str = "insertion"
) -> Solution:
    return greedy_complete(PartialSchedule(inst, mode), rule, rng).to_solution()
