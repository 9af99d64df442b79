from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jssp_mcts.exact import enumerate_optimal
from jssp_mcts.instance import Instance, generate_instance
from jssp_mcts.rules import DispatchRule
from jssp_mcts.schedule import MODES, PartialSchedule, Solution, verify_schedule
from jssp_mcts.search_tree import DescentPolicy, tree_search
from jssp_mcts.solvers import (
    Algorithm,
    SolverConfig,
    greedy_solve,
    mcs_search,
    mcs_solve,
    pilot_search,
    pilot_solve,
    rollout_heuristic,
    rollout_random,
    solve,
)
from jssp_mcts.solvers.greedy import greedy_complete

from conftest import instances

HEURISTICS = [DispatchRule.MWKR, DispatchRule.SPT, DispatchRule.LOPN]


def test_greedy_mwkr_instance_a(inst_a, rng):
    sol = greedy_solve(inst_a, DispatchRule.MWKR, rng)
    assert sol.seq == (1, 0, 1, 0)
    assert sol.makespan == 7
    assert verify_schedule(inst_a, sol.starts) is None


@pytest.mark.parametrize("rule", list(DispatchRule))
def test_greedy_trivial_cases(rule, rng):
    assert greedy_solve(Instance([[5]], [[0]]), rule, rng).makespan == 5
    twins = Instance([[4], [4]], [[0], [0]])
    assert greedy_solve(twins, rule, rng).makespan == 8


@settings(max_examples=60, deadline=None)
@given(instances(max_jobs=6, max_machines=6), st.sampled_from(list(DispatchRule)), st.sampled_from(MODES), st.integers(0, 2**32), st.data())
def test_kernel_matches_python_completion(inst, rule, mode, seed, data):
    """The compiled completion and the rules.select loop agree step for step."""
    prefix_len = data.draw(st.integers(0, inst.n_ops))
    ps = PartialSchedule(inst, mode)
    rnd = np.random.default_rng(seed + 1)
    for _ in range(prefix_len):
        jobs = ps.eligible_jobs()
        ps.dispatch(jobs[rnd.integers(len(jobs))])
    before = ps.copy()
    reward, seq = rollout_heuristic(ps, rule, np.random.default_rng(seed))
    # rollout leaves its input untouched
    assert ps.seq == before.seq and ps.starts == before.starts
    reference = greedy_complete(before, rule, np.random.default_rng(seed))
    assert seq == reference.seq
    assert reward == -reference.current_makespan()


def test_rollout_on_complete_schedule(inst_a, rng):
    ps = PartialSchedule(inst_a)
    for j in [0, 1, 1, 0]:
        ps.dispatch(j)
    assert rollout_heuristic(ps, DispatchRule.SPT, rng) == (-ps.current_makespan(), [0, 1, 1, 0])
    assert rollout_random(ps, rng) == (-ps.current_makespan(), [0, 1, 1, 0])


def test_rollout_heuristic_from_empty(inst_a, rng):
    assert rollout_heuristic(PartialSchedule(inst_a), DispatchRule.MWKR, rng) == (-7, [1, 0, 1, 0])


def test_rollout_keeps_prefix(rng):
    inst = generate_instance(4, 3, seed=2)
    ps = PartialSchedule(inst).dispatch(3).dispatch(0).dispatch(3)
    for rule in DispatchRule:
        _, seq = rollout_heuristic(ps, rule, rng)
        assert seq[:3] == [3, 0, 3] and len(seq) == 12


def _stepwise_distribution(inst):
    """Exact probability of each complete sequence when every step picks a
    uniformly random eligible job."""
    out = {}

    def walk(ps, prob):
        jobs = ps.eligible_jobs()
        if not jobs:
            out[tuple(ps.seq)] = prob
            return
        for j in jobs:
            walk(ps.copy().dispatch(j), prob * Fraction(1, len(jobs)))

    walk(PartialSchedule(inst), Fraction(1))
    return out


def test_rollout_random_distribution(inst_a):
    oracle = _stepwise_distribution(inst_a)
    assert sum(oracle.values()) == 1 and len(oracle) == 6
    assert oracle[(0, 0, 1, 1)] == Fraction(1, 4) and oracle[(0, 1, 0, 1)] == Fraction(1, 8)
    rng = np.random.default_rng(31)
    draws = 10_000
    counts = {}
    rewards = set()
    for _ in range(draws):
        reward, seq = rollout_random(PartialSchedule(inst_a), rng)
        counts[tuple(seq)] = counts.get(tuple(seq), 0) + 1
        rewards.add(reward)
    assert rewards == {-7, -11}
    for seq, p in oracle.items():
        assert abs(counts.get(seq, 0) / draws - float(p)) <= 0.02


def test_pilot_single_rollout_is_greedy(inst_a):
    assert pilot_solve(inst_a, DispatchRule.MWKR, 1, np.random.default_rng(0)).makespan == 7


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2**32), st.sampled_from(HEURISTICS))
def test_pilot_budget_one_equals_greedy(n, m, seed, rule):
    inst = generate_instance(n, m, seed=seed)
    pilot = pilot_solve(inst, rule, 1, np.random.default_rng(seed))
    greedy = greedy_solve(inst, rule, np.random.default_rng(seed))
    assert pilot == greedy


def test_pilot_enumerates_tiny_space():
    inst = Instance([[3], [5]], [[0], [0]])
    for rule in HEURISTICS:
        assert pilot_solve(inst, rule, 10, np.random.default_rng(1)).makespan == 8


def test_mcs_instance_a(inst_a):
    assert mcs_solve(inst_a, 50, 0.1, np.random.default_rng(3)).makespan == 7


def test_mcs_budget_one_is_one_random_rollout():
    inst = generate_instance(5, 4, seed=11)
    for seed in range(10):
        reward, seq = rollout_random(PartialSchedule(inst), np.random.default_rng(seed))
        sol = mcs_solve(inst, 1, 0.1, np.random.default_rng(seed))
        assert sol.seq == tuple(seq) and sol.makespan == -reward


@pytest.mark.parametrize("kind", ["pilot", "mcs"])
def test_best_equals_root_q_and_min_rollout(kind):
    inst = generate_instance(5, 5, seed=4)
    seen = []

    def recording(ps, r):
        out = rollout_heuristic(ps, DispatchRule.LOPN, r) if kind == "pilot" else rollout_random(ps, r)
        seen.append(-out[0])
        return out

    policy = DescentPolicy.pilot_random() if kind == "pilot" else DescentPolicy.eps_greedy(0.1)
    res = tree_search(inst, policy, recording, 400, np.random.default_rng(0))
    assert len(seen) == 400
    assert res.best_makespan == min(seen) == -res.root.Q
    assert Solution.from_sequence(inst, res.best_seq).makespan == res.best_makespan


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(2, 8), st.integers(0, 2**32), st.integers(1, 200), st.sampled_from(["pilot", "mcs"]))
def test_anytime_trace_and_budget(n, m, seed, budget, kind):
    inst = generate_instance(n, m, seed=seed)
    rng = np.random.default_rng(seed)
    if kind == "pilot":
        res = pilot_search(inst, DispatchRule.MWKR, budget, rng, trace_every=7)
    else:
        res = mcs_search(inst, budget, 0.1, rng, trace_every=7)
    assert res.rollouts == budget == res.root.n
    values = [v for _, v in res.trace]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert [k for k, _ in res.trace] == sorted(k for k, _ in res.trace)
    assert res.trace[-1] == (budget, res.best_makespan)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**32), st.sampled_from(MODES))
def test_solutions_valid_and_bounded(n, m, seed, mode):
    inst = generate_instance(n, m, seed=seed)
    configs = [SolverConfig(Algorithm.GREEDY, rule=r, seed=seed, mode=mode) for r in HEURISTICS]
    configs += [SolverConfig(Algorithm.PILOT, rule=r, budget=30, seed=seed, mode=mode) for r in HEURISTICS]
    configs.append(SolverConfig(Algorithm.MCS, rule=None, budget=60, seed=seed, mode=mode))
    for cfg in configs:
        sol = solve(inst, cfg).solution
        assert verify_schedule(inst, sol.starts) is None
        assert sol.makespan >= inst.trivial_lower_bound()
        assert len(sol.seq) == inst.n_ops


def test_solve_deterministic():
    inst = generate_instance(6, 6, seed=8)
    for cfg in [
        SolverConfig("greedy", rule="lopn", seed=5),
        SolverConfig("pilot", rule="spt", budget=300, seed=5),
        SolverConfig("mcs", rule=None, budget=300, seed=5),
    ]:
        a, b = solve(inst, cfg), solve(inst, cfg)
        assert a.solution == b.solution and a.trace == b.trace


def test_mcs_budget_of_sequence_count_usually_optimal():
    """With B equal to the number of distinct sequences MCS nearly always
    finds the optimum. It is not guaranteed: the descent may revisit fully
    evaluated subtrees, so a small miss rate is allowed."""
    from jssp_mcts.exact import interleaving_count

    hits = 0
    trials = 120
    for seed in range(trials):
        rnd = np.random.default_rng(seed)
        n, m = [(2, 2), (2, 3), (3, 2), (2, 4), (3, 3), (4, 2)][seed % 6]
        inst = generate_instance(n, m, 1, 30, seed=int(rnd.integers(2**31)))
        opt = enumerate_optimal(inst).makespan
        budget = max(interleaving_count(inst), 10)
        hits += mcs_solve(inst, budget, 0.1, np.random.default_rng(seed)).makespan == opt
    assert hits >= 0.97 * trials


def test_exhausted_search_is_optimal():
    """Once every terminal node has been rolled out the optimum is known."""
    for seed in range(20):
        inst = generate_instance(*[(2, 2), (2, 3), (3, 2)][seed % 3], 1, 30, seed=seed)
        opt = enumerate_optimal(inst).makespan
        res = mcs_search(inst, 50_000, 1.0, np.random.default_rng(seed), halt_when_exhausted=True)
        assert res.exhausted and res.best_makespan == opt and res.rollouts < 50_000
        res = pilot_search(inst, DispatchRule.SPT, 50_000, np.random.default_rng(seed), halt_when_exhausted=True)
        assert res.exhausted and res.best_makespan == opt and res.rollouts < 50_000


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig("pilot", rule=None)
    with pytest.raises(ValueError):
        SolverConfig("mcs", budget=0)
    with pytest.raises(ValueError):
        SolverConfig("mcs", epsilon=1.2)
    with pytest.raises(ValueError):
        SolverConfig("tabu")
    assert SolverConfig("MCS", budget=100).label == "mcs(eps=0.1,100)"
    assert SolverConfig("pilot", rule="MWKR", budget=100).label == "pilot(mwkr,100)"
