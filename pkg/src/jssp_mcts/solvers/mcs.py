"""Monte-Carlo tree scheduling: epsilon-greedy descent on max-backed values,
uniform random rollouts, and the best rollout ever seen as the answer."""

from __future__ import annotations

import numpy as np

from ..instance import Instance
from ..schedule import Solution
from ..search_tree import DescentPolicy, TreeSearchResult, tree_search
from .rollout import rollout_random

DEFAULT_EPSILON = 0.1


def mcs_search(
    inst: Instance,
    budget: int,
    epsilon: float = DEFAULT_EPSILON,
    rng: np.random.Generator | None = None,
    **kwargs,
) -> TreeSearchResult:
    if rng is None:
        rng = np.random.default_rng()
    return tree_search(inst, DescentPolicy.eps_greedy(epsilon), rollout_random, budget, rng, **kwargs)


def mcs_solve(
    inst: Instance,
    budget: int,
    epsilon: float = DEFAULT_EPSILON,
    rng: np.random.Generator | None = None,
    mode: str = "insertion",
) -> Solution:
    return Solution.from_sequence(inst, mcs_search(inst, budget, epsilon, rng, mode=mode).best_seq, mode)
