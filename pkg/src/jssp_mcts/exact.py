"""Optimal makespans: brute-force enumeration and branch-and-bound.

Both searches range over dispatch sequences with semi-active appending.
Job-shop makespan always has an optimal semi-active schedule, so the optimum
over that space is the true optimum.

``enumerate_optimal`` is deliberately naive and serves as the test oracle.
``branch_and_bound`` branches on Giffler-Thompson conflict sets (which
generate every active schedule) and prunes with job-chain bounds and
preemptive one-machine bounds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .instance import Instance
from .rules import DispatchRule
from .schedule import PartialSchedule, Solution


class TooLargeError(ValueError):
    """Instance exceeds the enumeration cap."""


@dataclass(frozen=True)
class ExactResult:
    makespan: int
    proven_optimal: bool
    schedule: Solution
    nodes_explored: int
    time_limit_hit: bool
    seconds: float = 0.0


def interleaving_count(inst: Instance) -> int:
    """Number of distinct dispatch sequences: (n*m)! / (m!)^n."""
    return math.factorial(inst.n_ops) // math.factorial(inst.m) ** inst.n


def lower_bound(ps: PartialSchedule) -> int:
    """Admissible bound on any completion of ``ps``.

    Largest of each job's ready time plus its remaining work and, per
    machine, the time from which its remaining load must still be processed
    plus that load. Appending never uses the past, so that time is the
    machine's ready time; with gap insertion only the already booked
    processing time is certain.
    """
    inst = ps.inst
    lb = 0
    remaining_load = [0] * inst.m
    for j in range(inst.n):
        rest = 0
        for i in range(ps.t[j], inst.m):
            d = inst.proc_time[j][i]
            rest += d
            remaining_load[inst.route[j][i]] += d
        lb = max(lb, ps.job_ready[j] + rest)
    for a in range(inst.m):
        if ps.mode == "append":
            floor = ps.mach_ready[a]
        else:
            floor = sum(v - u for u, v in ps.slots[a])
        lb = max(lb, floor + remaining_load[a])
    return lb


def head_tail_bound(ps: PartialSchedule) -> int:
    """The (stronger) bound used inside branch-and-bound; append mode only."""
    if ps.mode != "append":
        raise ValueError("head/tail bound assumes appended schedules")
    inst = ps.inst
    p, route = inst.p_array, inst.route_array
    tail = np.zeros_like(p)
    for j in range(inst.n):
        for i in range(inst.m):
            tail[j, i] = p[j, i + 1:].sum()
    return int(
        _kernels._bound(
            p,
            route,
            tail,
            np.array(ps.t, dtype=np.int64),
            np.array(ps.job_ready, dtype=np.int64),
            np.array(ps.mach_ready, dtype=np.int64),
        )
    )


def enumerate_optimal(inst: Instance, max_ops: int = 12, max_sequences: int = 1_000_000) -> ExactResult:
    """Evaluate every dispatch interleaving and keep the best."""
    count = interleaving_count(inst)
    if inst.n_ops > max_ops or count > max_sequences:
        raise TooLargeError(
            f"{inst.n}x{inst.m} has {count} sequences over {inst.n_ops} operations "
            f"(caps: {max_sequences} sequences, {max_ops} operations)"
        )
    t0 = time.perf_counter()
    n, m, p, route = inst.n, inst.m, inst.proc_time, inst.route
    total = inst.n_ops
    t = [0] * n
    job_ready = [0] * n
    mach_ready = [0] * m
    seq: list[int] = []
    best = [math.inf, None]
    leaves = 0

    def walk():
        nonlocal leaves
        if len(seq) == total:
            leaves += 1
            ms = max(mach_ready)
            if ms < best[0]:
                best[0], best[1] = ms, list(seq)
            return
        for j in range(n):
            i = t[j]
            if i == m:
                continue
            a = route[j][i]
            old_j, old_a = job_ready[j], mach_ready[a]
            end = max(old_j, old_a) + p[j][i]
            job_ready[j] = mach_ready[a] = end
            t[j] = i + 1
            seq.append(j)
            walk()
            seq.pop()
            t[j] = i
            job_ready[j], mach_ready[a] = old_j, old_a

    walk()
    sol = Solution.from_sequence(inst, best[1], "append")
    return ExactResult(
        makespan=sol.makespan,
        proven_optimal=True,
        schedule=sol,
        nodes_explored=leaves,
        time_limit_hit=False,
        seconds=time.perf_counter() - t0,
    )


def branch_and_bound(
    inst: Instance,
    time_limit: float = 60.0,
    node_limit: int = 0,
    incumbent: Solution | None = None,
) -> ExactResult:
    """Depth-first branch-and-bound seeded with the greedy MWKR schedule.

    A better known ``incumbent`` may be supplied; it only tightens pruning.
    ``proven_optimal`` is True only if the search finished inside the
    limits. A ``time_limit`` of 0 returns the incumbent unsearched.
    """
    from .solvers.greedy import greedy_solve

    t0 = time.perf_counter()
    greedy = greedy_solve(inst, DispatchRule.MWKR, np.random.default_rng(0))
    if incumbent is None or greedy.makespan <= incumbent.makespan:
        incumbent = greedy
    if time_limit <= 0:
        return ExactResult(incumbent.makespan, False, incumbent, 0, True, time.perf_counter() - t0)
    if incumbent.makespan == inst.trivial_lower_bound():
        return ExactResult(incumbent.makespan, True, incumbent, 0, False, time.perf_counter() - t0)

    best_seq = np.array(incumbent.seq, dtype=np.int64)
    best, nodes, completed = _kernels.branch_and_bound_search(
        inst.p_array, inst.route_array, incumbent.makespan, best_seq, float(time_limit), int(node_limit)
    )
    sol = incumbent if best == incumbent.makespan else Solution.from_sequence(inst, best_seq.tolist(), "append")
    assert sol.makespan == best
    return ExactResult(
        makespan=int(best),
        proven_optimal=bool(completed),
        schedule=sol,
        nodes_explored=int(nodes),
        time_limit_hit=not completed,
        seconds=time.perf_counter() - t0,
    )
