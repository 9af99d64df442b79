"""Job-shop instances: data model, text format and random generator.

Every job visits every machine exactly once, so an instance is fully
described by two ``n x m`` tables: processing times and machine routes.
Machines and jobs are 0-based in memory and 1-based in files.

File layout::

    <n> <m>
    <m processing times of job 1, in processing order>
    ...
    <m processing times of job n>
    <m machine ids (1-based) of job 1, in processing order>
    ...
    <m machine ids of job n>
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Instance:
    """An ``n x m`` job-shop problem.

    ``proc_time[j][i]`` is the duration of the i-th operation of job ``j``
    and ``route[j][i]`` the (0-based) machine that performs it.
    """

    proc_time: tuple[tuple[int, ...], ...]
    route: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        p = tuple(tuple(int(v) for v in row) for row in self.proc_time)
        r = tuple(tuple(int(v) for v in row) for row in self.route)
        object.__setattr__(self, "proc_time", p)
        object.__setattr__(self, "route", r)
        if not p or not p[0]:
            raise ValueError("instance needs at least one job and one machine")
        n, m = len(p), len(p[0])
        if len(r) != n:
            raise ValueError(f"{n} processing-time rows but {len(r)} route rows")
        machines = set(range(m))
        for j in range(n):
            if len(p[j]) != m or len(r[j]) != m:
                raise ValueError(f"job {j} does not have {m} operations")
            if min(p[j]) < 1:
                raise ValueError(f"job {j} has a processing time < 1")
            if set(r[j]) != machines:
                raise ValueError(f"route of job {j} is not a permutation of the machines")

    @property
    def n(self) -> int:
        return len(self.proc_time)

    @property
    def m(self) -> int:
        return len(self.proc_time[0])

    @property
    def n_ops(self) -> int:
        return self.n * self.m

    @cached_property
    def p_array(self) -> np.ndarray:
        """Processing times as a contiguous ``(n, m)`` int64 array."""
        a = np.array(self.proc_time, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def route_array(self) -> np.ndarray:
        a = np.array(self.route, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def job_work(self) -> tuple[int, ...]:
        """Total processing time of each job."""
        return tuple(sum(row) for row in self.proc_time)

    @cached_property
    def machine_load(self) -> tuple[int, ...]:
        """Total processing time assigned to each machine."""
        load = [0] * self.m
        for prow, rrow in zip(self.proc_time, self.route):
            for d, a in zip(prow, rrow):
                load[a] += d
        return tuple(load)

    def trivial_lower_bound(self) -> int:
        """Longest job chain or heaviest machine, whichever is larger."""
        return max(max(self.job_work), max(self.machine_load))


def parse_instance(text: str) -> Instance:
    """Parse the text format described in the module docstring."""
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if tokens:
            rows.append((lineno, tokens))
    if not rows:
        raise InstanceFormatError("empty instance file", 1)

    lineno, header = rows[0]
    if len(header) != 2:
        raise InstanceFormatError("header must be '<n> <m>'", lineno)
    n, m = (_parse_int(tok, lineno) for tok in header)
    if n < 1 or m < 1:
        raise InstanceFormatError("n and m must be positive", lineno)
    if len(rows) != 2 * n + 1:
        last = rows[-1][0]
        raise InstanceFormatError(f"expected {2 * n} data rows, found {len(rows) - 1}", last)

    proc, route = [], []
    for k, (lineno, tokens) in enumerate(rows[1:]):
        if len(tokens) != m:
            raise InstanceFormatError(f"expected {m} values, found {len(tokens)}", lineno)
        values = [_parse_int(tok, lineno) for tok in tokens]
        if k < n:
            if min(values) < 1:
                raise InstanceFormatError("processing times must be >= 1", lineno)
            proc.append(values)
        else:
            if sorted(values) != list(range(1, m + 1)):
                raise InstanceFormatError(f"route is not a permutation of 1..{m}", lineno)
            route.append([v - 1 for v in values])
    return Instance(proc, route)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceFormatError(f"not an integer: {token!r}", lineno) from None


def write_instance(inst: Instance) -> str:
    """Canonical text form; single spaces, no trailing newline."""
    lines = [f"{inst.n} {inst.m}"]
    lines += [" ".join(map(str, row)) for row in inst.proc_time]
    lines += [" ".join(str(a + 1) for a in row) for row in inst.route]
    return "\n".join(lines)


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(write_instance(inst) + "\n", encoding="utf-8")


def generate_instance(n: int, m: int, p_min: int = 1, p_max: int = 200, seed: int = 0) -> Instance:
    """Random instance in the style of Taillard's generator.

    Uses numpy's PCG64 (``default_rng(seed)``). Draw order: the ``n x m``
    processing-time table row by row, then one Fisher-Yates shuffle per job
    for the routes.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    if not 1 <= p_min <= p_max:
        raise ValueError(f"need 1 <= p_min <= p_max, got {p_min}, {p_max}")
    rng = np.random.default_rng(seed)
    proc = rng.integers(p_min, p_max, size=(n, m), endpoint=True)
    route = [rng.permutation(m) for _ in range(n)]
    return Instance(proc.tolist(), [r.tolist() for r in route])
