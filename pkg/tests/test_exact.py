import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jssp_mcts.exact import (
    TooLargeError,
    branch_and_bound,
    enumerate_optimal,
    head_tail_bound,
    interleaving_count,
    lower_bound,
)
from jssp_mcts.instance import Instance, generate_instance
from jssp_mcts.schedule import MODES, PartialSchedule, Solution, verify_schedule

from conftest import tiny_instances


def best_completion(ps):
    """Brute force over every completion of ``ps`` (same timing mode)."""
    jobs = ps.eligible_jobs()
    if not jobs:
        return ps.current_makespan()
    return min(best_completion(ps.copy().dispatch(j)) for j in jobs)


def test_instance_a(inst_a):
    enum = enumerate_optimal(inst_a)
    assert enum.makespan == 7 and enum.proven_optimal and enum.nodes_explored == 6
    bnb = branch_and_bound(inst_a)
    assert bnb.makespan == 7 and bnb.proven_optimal
    # machine 1 carries 3 + 4 = 7
    assert inst_a.trivial_lower_bound() == 7


def test_trivial_instances():
    assert enumerate_optimal(Instance([[5]], [[0]])).makespan == 5
    chain = Instance([[4, 1, 6]], [[2, 0, 1]])
    assert enumerate_optimal(chain).makespan == 11
    assert branch_and_bound(chain).makespan == 11


def test_enumeration_cap():
    with pytest.raises(TooLargeError):
        enumerate_optimal(generate_instance(4, 4, seed=0))
    with pytest.raises(TooLargeError):
        enumerate_optimal(generate_instance(10, 1, seed=0))
    assert interleaving_count(generate_instance(3, 2, seed=0)) == 90


def test_zero_time_limit_returns_greedy(inst_a):
    res = branch_and_bound(generate_instance(6, 6, seed=3), time_limit=0)
    assert not res.proven_optimal and res.time_limit_hit and res.nodes_explored == 0
    from jssp_mcts.rules import DispatchRule
    from jssp_mcts.solvers import greedy_solve

    greedy = greedy_solve(generate_instance(6, 6, seed=3), DispatchRule.MWKR, np.random.default_rng(0))
    assert res.makespan == greedy.makespan


def test_better_incumbent_is_used():
    inst = generate_instance(6, 6, seed=12)
    opt = branch_and_bound(inst)
    res = branch_and_bound(inst, incumbent=opt.schedule)
    assert res.makespan == opt.makespan and res.proven_optimal
    assert res.nodes_explored <= opt.nodes_explored


@settings(max_examples=60, deadline=None)
@given(tiny_instances())
def test_bnb_matches_enumeration(inst):
    enum = enumerate_optimal(inst)
    bnb = branch_and_bound(inst)
    assert bnb.proven_optimal
    assert bnb.makespan == enum.makespan
    for res in (enum, bnb):
        assert verify_schedule(inst, res.schedule.starts) is None
        assert res.schedule.makespan == res.makespan


@settings(max_examples=40, deadline=None)
@given(tiny_instances(max_sequences=1000))
def test_optimum_independent_of_timing_mode(inst):
    pool = [j for j in range(inst.n) for _ in range(inst.m)]
    best = min(Solution.from_sequence(inst, s, "insertion").makespan for s in set(itertools.permutations(pool)))
    assert best == enumerate_optimal(inst).makespan


def test_lower_bound_examples(inst_a):
    for mode in MODES:
        assert lower_bound(PartialSchedule(inst_a, mode)) == 7
        full = Solution.from_sequence(inst_a, [0, 0, 1, 1], mode)
        ps = PartialSchedule(inst_a, mode)
        for j in [0, 0, 1, 1]:
            ps.dispatch(j)
        assert lower_bound(ps) == full.makespan


@settings(max_examples=30, deadline=None)
@given(tiny_instances(max_sequences=500), st.sampled_from(MODES), st.integers(0, 2**32))
def test_bounds_admissible_and_monotone(inst, mode, seed):
    rnd = np.random.default_rng(seed)
    ps = PartialSchedule(inst, mode)
    previous = 0
    while True:
        best = best_completion(ps)
        lb = lower_bound(ps)
        assert previous <= lb <= best
        previous = lb
        if mode == "append":
            assert head_tail_bound(ps) <= best
            assert head_tail_bound(ps) >= lb
        jobs = ps.eligible_jobs()
        if not jobs:
            break
        ps.dispatch(jobs[rnd.integers(len(jobs))])


def test_head_tail_bound_rejects_insertion(inst_a):
    with pytest.raises(ValueError):
        head_tail_bound(PartialSchedule(inst_a, "insertion"))


def test_bnb_6x6_proven_and_valid():
    for seed in range(10):
        inst = generate_instance(6, 6, seed=seed)
        res = branch_and_bound(inst, time_limit=60)
        assert res.proven_optimal
        assert verify_schedule(inst, res.schedule.starts) is None
        assert res.makespan >= inst.trivial_lower_bound()
