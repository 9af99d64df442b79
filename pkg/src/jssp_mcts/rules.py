"""Priority dispatch rules.

Each call to :func:`select` consumes exactly one uniform draw from ``rng``,
used to break ties among equally ranked jobs (ties are listed in job-index
order and the ``floor(u * count)``-th one is taken). The compiled rollout
kernel follows the same convention, so a Python completion and a kernel
completion fed from the same stream make identical choices.
"""

from __future__ import annotations

import enum

import numpy as np

from .schedule import PartialSchedule, ScheduleError


class DispatchRule(enum.Enum):
    MWKR = "mwkr"  # most work remaining
    SPT = "spt"  # shortest imminent processing time
    LOPN = "lopn"  # fewest operations dispatched so far
    RANDOM = "random"

    @classmethod
    def parse(cls, name: str | DispatchRule) -> DispatchRule:
        if isinstance(name, cls):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = "|".join(r.value for r in cls)
            raise ValueError(f"unknown rule {name!r}; expected one of {choices}") from None

    @property
    def code(self) -> int:
        """Integer id used by the compiled kernels."""
        return _CODES[self]


_CODES = {DispatchRule.MWKR: 0, DispatchRule.SPT: 1, DispatchRule.LOPN: 2, DispatchRule.RANDOM: 3}


def priorities(rule: DispatchRule, ps: PartialSchedule, jobs: list[int]) -> list[int]:
    """Score each job so that higher is better under ``rule``."""
    p = ps.inst.proc_time
    if rule is DispatchRule.MWKR:
        return [ps.remaining_work(j) for j in jobs]
    if rule is DispatchRule.SPT:
        return [-p[j][ps.t[j]] for j in jobs]
    if rule is DispatchRule.LOPN:
        return [-ps.t[j] for j in jobs]
    return [0] * len(jobs)


def select(rule: DispatchRule, ps: PartialSchedule, rng: np.random.Generator) -> int:
    """Pick the next job to dispatch under ``rule``."""
    jobs = ps.eligible_jobs()
    if not jobs:
        raise ScheduleError("no eligible job: schedule is complete")
    u = rng.random()
    scores = priorities(rule, ps, jobs)
    best = max(scores)
    tied = [j for j, s in zip(jobs, scores) if s == best]
    return tied[int(u * len(tied))]
