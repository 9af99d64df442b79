"""Search tree over dispatch decisions, shared by the Pilot and MCS solvers.

A node stands for the partial schedule obtained by dispatching the jobs on
the path from the root. Nodes keep a visit count ``n`` and the best reward
``Q`` seen through them (reward is the negative makespan, backed up with
``max``). Schedules are not stored on nodes; :func:`descend` rebuilds the
leaf's partial schedule by replaying the path.

One tree walk is: descend to a leaf, expand all of its children, complete
the leaf's schedule with a rollout, back the reward up the path.

Random draws per visited internal node, in order:

* some child unvisited: one draw, uniform over the unvisited children;
* Pilot-random: one draw, uniform over the children;
* epsilon-greedy: one draw decides explore (``u < epsilon``) or exploit,
  a second draw picks uniformly among all children (explore) or among the
  children tied for the highest ``Q`` (exploit).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .instance import Instance
from .schedule import PartialSchedule

# (partial schedule, rng) -> (reward = -makespan, complete dispatch sequence)
Rollout = Callable[[PartialSchedule, np.random.Generator], "tuple[int, list[int]]"]


class SearchNode:
    __slots__ = ("n", "Q", "children", "parent", "job", "exhausted")

    def __init__(self, parent: SearchNode | None = None, job: int | None = None):
        self.n = 0
        self.Q = -math.inf
        self.children: dict[int, SearchNode] = {}
        self.parent = parent
        self.job = job
        # every schedule below this node has been rolled out at least once
        self.exhausted = False

    def __repr__(self) -> str:
        return f"SearchNode(job={self.job}, n={self.n}, Q={self.Q}, children={len(self.children)})"

    @property
    def depth(self) -> int:
        d, node = 0, self
        while node.parent is not None:
            d += 1
            node = node.parent
        return d

    def iter_nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children.values())))


@dataclass(frozen=True)
class DescentPolicy:
    """How a walk chooses among already visited children."""

    kind: str  # "pilot_random" or "eps_greedy"
    epsilon: float = 1.0

    def __post_init__(self):
        if self.kind not in ("pilot_random", "eps_greedy"):
            raise ValueError(f"unknown descent policy {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    @classmethod
    def pilot_random(cls) -> DescentPolicy:
        return cls("pilot_random")

    @classmethod
    def eps_greedy(cls, epsilon: float = 0.1) -> DescentPolicy:
        return cls("eps_greedy", epsilon)


def choose_child(node: SearchNode, policy: DescentPolicy, rng: np.random.Generator) -> SearchNode:
    kids = list(node.children.values())
    unvisited = [c for c in kids if c.n == 0]
    if unvisited:
        return unvisited[int(rng.random() * len(unvisited))]
    if policy.kind == "pilot_random":
        return kids[int(rng.random() * len(kids))]
    explore = rng.random() < policy.epsilon
    u = rng.random()
    if explore:
        return kids[int(u * len(kids))]
    best = max(c.Q for c in kids)
    tied = [c for c in kids if c.Q == best]
    return tied[int(u * len(tied))]


def descend(
    root: SearchNode,
    inst: Instance,
    policy: DescentPolicy,
    rng: np.random.Generator,
    start: PartialSchedule | None = None,
) -> tuple[SearchNode, list[SearchNode], PartialSchedule]:
    """Walk from ``root`` to a node without children.

    Returns the leaf, the root-to-leaf path and the leaf's partial schedule
    (a fresh copy of ``start``, or the empty schedule, with the path's jobs
    dispatched).
    """
    ps = start.copy() if start is not None else PartialSchedule(inst)
    node = root
    path = [root]
    while node.children:
        node = choose_child(node, policy, rng)
        ps.dispatch(node.job)
        path.append(node)
    return node, path, ps


def expand(leaf: SearchNode, ps: PartialSchedule) -> None:
    """Create one unvisited child per eligible job of ``ps``."""
    for j in ps.eligible_jobs():
        leaf.children[j] = SearchNode(parent=leaf, job=j)


def backpropagate(path: list[SearchNode], reward: float) -> None:
    for node in path:
        node.n += 1
        if reward > node.Q:
            node.Q = reward


def _mark_exhausted(leaf: SearchNode) -> None:
    node = leaf
    node.exhausted = True
    while node.parent is not None:
        node = node.parent
        if all(c.exhausted for c in node.children.values()):
            node.exhausted = True
        else:
            break


@dataclass
class TreeSearchResult:
    best_seq: list[int]
    best_makespan: int
    rollouts: int
    trace: list[tuple[int, int]]
    root: SearchNode
    seconds: float
    rollout_seconds: float = 0.0
    exhausted: bool = field(default=False)


def tree_search(
    inst: Instance,
    policy: DescentPolicy,
    rollout: Rollout,
    budget: int,
    rng: np.random.Generator,
    *,
    start: PartialSchedule | None = None,
    mode: str = "insertion",
    trace_every: int = 0,
    halt_when_exhausted: bool = False,
) -> TreeSearchResult:
    """Run ``budget`` tree walks and keep the best complete schedule seen.

    The root stands for ``start`` (default: the empty schedule in ``mode``).
    The best rollout is kept outside the tree and returned as is, so its
    makespan always equals ``-root.Q``. The trace records
    ``(rollouts_done, best_makespan)`` at every improvement, every
    ``trace_every`` rollouts when positive, and after the last rollout.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    t0 = time.perf_counter()
    if start is None:
        start = PartialSchedule(inst, mode)
    rollout_time = 0.0
    root = SearchNode()
    best_ms = math.inf
    best_seq: list[int] = []
    trace: list[tuple[int, int]] = []
    done = 0
    while done < budget:
        if halt_when_exhausted and root.exhausted:
            break
        leaf, path, ps = descend(root, inst, policy, rng, start)
        expand(leaf, ps)
        r0 = time.perf_counter()
        reward, seq = rollout(ps, rng)
        rollout_time += time.perf_counter() - r0
        done += 1
        backpropagate(path, reward)
        ms = -reward
        if not leaf.children:
            _mark_exhausted(leaf)
        if ms < best_ms:
            best_ms, best_seq = ms, seq
            trace.append((done, ms))
        elif trace_every > 0 and done % trace_every == 0:
            trace.append((done, best_ms))
    if trace[-1][0] != done:
        trace.append((done, best_ms))
    return TreeSearchResult(
        best_seq=best_seq,
        best_makespan=int(best_ms),
        rollouts=done,
        trace=trace,
        root=root,
        seconds=time.perf_counter() - t0,
        rollout_seconds=rollout_time,
        exhausted=root.exhausted,
    )


def dump_tree(root: SearchNode, max_depth: int = 3) -> dict:
    """JSON-ready nested dict of the tree, cut off below ``max_depth``."""

    def visit(node: SearchNode, depth: int) -> dict:
        out = {
            "job": node.job,
            "n": node.n,
            "Q": None if node.Q == -math.inf else node.Q,
            "depth": depth,
        }
        if depth < max_depth and node.children:
            out["children"] = [visit(c, depth + 1) for c in node.children.values()]
        elif node.children:
            out["truncated_children"] = len(node.children)
        return out

    return visit(root, 0)
