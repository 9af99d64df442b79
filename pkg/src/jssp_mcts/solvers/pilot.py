"""Pilot (rollout) method: random tree descent, heuristic completions."""

from __future__ import annotations

import numpy as np

from ..instance import Instance
from ..rules import DispatchRule
from ..schedule import Solution
from ..search_tree import DescentPolicy, TreeSearchResult, tree_search
from .rollout import rollout_heuristic


def pilot_search(
    inst: Instance,
    rule: DispatchRule,
    budget: int,
    rng: np.random.Generator,
    **kwargs,
) -> TreeSearchResult:
    """Grow one tree from the empty schedule with ``budget`` heuristic rollouts.

    Unvisited children are tried first; otherwise the walk picks children
    uniformly at random. Extra keyword arguments go to :func:`tree_search`.
    """
    return tree_search(
        inst,
        DescentPolicy.pilot_random(),
        lambda ps, r: rollout_heuristic(ps, rule, r),
        budget,
        rng,
        **kwargs,
    )


def pilot_solve(
    inst: Instance, rule: DispatchRule, budget: int, rng: np.random.Generator, mode: str = "insertion"
) -> Solution:
    return Solution.from_sequence(inst, pilot_search(inst, rule, budget, rng, mode=mode).best_seq, mode)
