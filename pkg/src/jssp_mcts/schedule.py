"""Partial schedules built by dispatching jobs, and schedule validation.

A dispatch places the next operation of a job on its machine. Two timing
modes are supported:

``"insertion"`` (default)
    The operation goes into the earliest idle gap on its machine that
    starts no earlier than the job's previous operation ends and is long
    enough to hold it; otherwise after the machine's last operation.
    Every dispatch order then decodes to an active schedule.
``"append"``
    The operation starts at ``max(job ready, machine ready)``; idle gaps
    are never back-filled (semi-active schedules).

Both modes reach an optimal schedule for some dispatch order, so optimal
makespans do not depend on the mode. Operation counters are 0-based:
``t[j]`` is the index of job ``j``'s next operation and ``t[j] == m`` means
the job is complete.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .instance import Instance

UNSCHEDULED = -1
MODES = ("insertion", "append")


class ScheduleError(ValueError):
    """Raised on an illegal dispatch or when a complete schedule is required."""


class PartialSchedule:
    """A k-solution: the first k dispatch decisions and the resulting timing."""

    __slots__ = ("inst", "mode", "seq", "t", "starts", "job_ready", "mach_ready", "slots")

    def __init__(self, inst: Instance, mode: str = "insertion"):
        if mode not in MODES:
            raise ValueError(f"unknown schedule mode {mode!r}; expected one of {MODES}")
        self.inst = inst
        self.mode = mode
        self.seq: list[int] = []
        self.t = [0] * inst.n
        self.starts = [[UNSCHEDULED] * inst.m for _ in range(inst.n)]
        self.job_ready = [0] * inst.n
        self.mach_ready = [0] * inst.m
        # per machine: busy intervals (start, end) sorted by start
        self.slots: list[list[tuple[int, int]]] = [[] for _ in range(inst.m)]

    def copy(self) -> PartialSchedule:
        other = PartialSchedule.__new__(PartialSchedule)
        other.inst = self.inst
        other.mode = self.mode
        other.seq = self.seq.copy()
        other.t = self.t.copy()
        other.starts = [row.copy() for row in self.starts]
        other.job_ready = self.job_ready.copy()
        other.mach_ready = self.mach_ready.copy()
        other.slots = [row.copy() for row in self.slots]
        return other

    def earliest_start(self, j: int) -> int:
        """Start time the next operation of job ``j`` would get."""
        i = self.t[j]
        a = self.inst.route[j][i]
        start = self.job_ready[j]
        if self.mode == "append":
            return max(start, self.mach_ready[a])
        d = self.inst.proc_time[j][i]
        for u, v in self.slots[a]:
            if start + d <= u:
                return start
            if v > start:
                start = v
        return start

    def dispatch(self, j: int) -> PartialSchedule:
        """Schedule the next operation of job ``j`` in place; returns self."""
        i = self.t[j]
        inst = self.inst
        if i >= inst.m:
            raise ScheduleError(f"job {j} is already complete")
        a = inst.route[j][i]
        start = self.earliest_start(j)
        end = start + inst.proc_time[j][i]
        row = self.slots[a]
        k = len(row)
        while k > 0 and row[k - 1][0] > start:
            k -= 1
        row.insert(k, (start, end))
        self.starts[j][i] = start
        self.job_ready[j] = end
        if end > self.mach_ready[a]:
            self.mach_ready[a] = end
        self.t[j] = i + 1
        self.seq.append(j)
        return self

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """The dispatch sequence as (job, machine) pairs."""
        seen = [0] * self.inst.n
        out = []
        for j in self.seq:
            out.append((j, self.inst.route[j][seen[j]]))
            seen[j] += 1
        return out

    @property
    def is_complete(self) -> bool:
        return len(self.seq) == self.inst.n_ops

    def eligible_jobs(self) -> list[int]:
        """Jobs with at least one undispatched operation, in index order."""
        m = self.inst.m
        return [j for j, tj in enumerate(self.t) if tj < m]

    def remaining_work(self, j: int) -> int:
        return sum(self.inst.proc_time[j][self.t[j]:])

    def current_makespan(self) -> int:
        """Completion time of the latest operation dispatched so far."""
        return max(self.job_ready)

    def to_solution(self) -> Solution:
        if not self.is_complete:
            raise ScheduleError(f"schedule has {len(self.seq)} of {self.inst.n_ops} operations")
        return Solution(
            seq=tuple(self.seq),
            starts=tuple(tuple(row) for row in self.starts),
            makespan=self.current_makespan(),
        )


@dataclass(frozen=True)
class Solution:
    """A complete schedule: dispatch sequence, start times and makespan."""

    seq: tuple[int, ...]
    starts: tuple[tuple[int, ...], ...]
    makespan: int

    @classmethod
    def from_sequence(cls, inst: Instance, seq: Iterable[int], mode: str = "insertion") -> Solution:
        ps = PartialSchedule(inst, mode)
        for j in seq:
            ps.dispatch(j)
        return ps.to_solution()


def empty_schedule(inst: Instance, mode: str = "insertion") -> PartialSchedule:
    return PartialSchedule(inst, mode)


def eligible_jobs(ps: PartialSchedule) -> list[int]:
    return ps.eligible_jobs()


def dispatch(ps: PartialSchedule, j: int) -> PartialSchedule:
    return ps.dispatch(j)


def remaining_work(ps: PartialSchedule, j: int) -> int:
    return ps.remaining_work(j)


def makespan(inst: Instance, starts: Sequence[Sequence[int]]) -> int:
    """Latest completion of any job's final operation."""
    m = inst.m
    if any(row[i] == UNSCHEDULED for row in starts for i in range(m)):
        raise ScheduleError("makespan needs a complete schedule")
    return max(starts[j][m - 1] + inst.proc_time[j][m - 1] for j in range(inst.n))


@dataclass(frozen=True)
class Violation:
    """First constraint a start-time table breaks."""

    kind: str  # "missing", "negative", "precedence" or "machine"
    job: int
    op: int
    other_job: int | None = None
    other_op: int | None = None
    machine: int | None = None

    def __str__(self) -> str:
        if self.kind == "machine":
            return (
                f"machine {self.machine}: job {self.job} op {self.op} overlaps "
                f"job {self.other_job} op {self.other_op}"
            )
        if self.kind == "precedence":
            return f"job {self.job}: op {self.op} starts before op {self.op - 1} completes"
        return f"job {self.job} op {self.op}: {self.kind} start time"


def verify_schedule(inst: Instance, starts: Sequence[Sequence[int]]) -> Violation | None:
    """Check a start-time table against the job-shop constraints.

    Returns ``None`` when every start is non-negative, every job runs its
    operations in route order without overlap, and no two operations on the
    same machine overlap. Otherwise returns the first violation found.
    Only the table is inspected, never a dispatch order.
    """
    n, m, p, route = inst.n, inst.m, inst.proc_time, inst.route
    if len(starts) != n or any(len(row) != m for row in starts):
        raise ValueError(f"start table must be {n} x {m}")
    for j in range(n):
        for i in range(m):
            if starts[j][i] is None or starts[j][i] == UNSCHEDULED:
                return Violation("missing", j, i)
            if starts[j][i] < 0:
                return Violation("negative", j, i)
    for j in range(n):
        for i in range(1, m):
            if starts[j][i] < starts[j][i - 1] + p[j][i - 1]:
                return Violation("precedence", j, i)
    ops_on = [[] for _ in range(m)]
    for j in range(n):
        for i in range(m):
            ops_on[route[j][i]].append((j, i))
    for a, ops in enumerate(ops_on):
        for u in range(len(ops)):
            j, i = ops[u]
            sj, ej = starts[j][i], starts[j][i] + p[j][i]
            for k, h in ops[u + 1:]:
                sk, ek = starts[k][h], starts[k][h] + p[k][h]
                if not (sj >= ek or sk >= ej):
                    return Violation("machine", j, i, k, h, a)
    return None


def solution_csv(inst: Instance, sol: Solution) -> str:
    """One row per operation: job, op_index, machine, start, duration (1-based ids)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["job", "op_index", "machine", "start", "duration"])
    for j in range(inst.n):
        for i in range(inst.m):
            w.writerow([j + 1, i + 1, inst.route[j][i] + 1, sol.starts[j][i], inst.proc_time[j][i]])
    return buf.getvalue()
