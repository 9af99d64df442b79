"""Rollouts: complete a partial schedule with a rule and score it."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..rules import DispatchRule
from ..schedule import PartialSchedule


def rollout_heuristic(
    ps: PartialSchedule, rule: DispatchRule, rng: np.random.Generator
) -> tuple[int, list[int]]:
    """Complete ``ps`` greedily under ``rule`` without modifying it.

    Returns ``(-makespan, full dispatch sequence)``. Draws one uniform per
    remaining operation, exactly as repeated :func:`rules.select` calls would.
    """
    inst = ps.inst
    remaining = inst.n_ops - len(ps.seq)
    uniforms = rng.random(remaining)
    out = np.empty(remaining, dtype=np.int64)
    ms = _kernels.complete_schedule(
        inst.p_array,
        inst.route_array,
        np.array(ps.seq, dtype=np.int64),
        ps.mode == "insertion",
        rule.code,
        uniforms,
        out,
    )
    return -int(ms), ps.seq + out.tolist()


def rollout_random(ps: PartialSchedule, rng: np.random.Generator) -> tuple[int, list[int]]:
    """Complete ``ps`` by dispatching a uniformly chosen eligible job at each step."""
    return rollout_heuristic(ps, DispatchRule.RANDOM, rng)
