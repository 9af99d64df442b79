"""Compiled inner loops: rule-driven completion and branch-and-bound.

All arrays are int64 and 0-based. Rule codes match ``DispatchRule.code``.
"""

from __future__ import annotations

import time

import numba
import numpy as np

MWKR, SPT, LOPN, RANDOM = 0, 1, 2, 3


@numba.njit(cache=True, inline="always")
def _place(p, route, j, t, job_ready, slot_start, slot_end, slot_count, insertion):
    """Dispatch the next operation of job ``j``; mirrors ``PartialSchedule.dispatch``."""
    i = t[j]
    a = route[j, i]
    d = p[j, i]
    start = job_ready[j]
    c = slot_count[a]
    pos = c
    if insertion:
        for k in range(c):
            if start + d <= slot_start[a, k]:
                pos = k
                break
            if slot_end[a, k] > start:
                start = slot_end[a, k]
    elif c > 0 and slot_end[a, c - 1] > start:
        start = slot_end[a, c - 1]
    for k in range(c, pos, -1):
        slot_start[a, k] = slot_start[a, k - 1]
        slot_end[a, k] = slot_end[a, k - 1]
    slot_start[a, pos] = start
    slot_end[a, pos] = start + d
    slot_count[a] = c + 1
    job_ready[j] = start + d
    t[j] = i + 1


@numba.njit(cache=True)
def complete_schedule(p, route, prefix, insertion, rule, uniforms, out_seq):
    """Replay ``prefix`` and finish the schedule by repeatedly applying ``rule``.

    Step ``k`` of the completion breaks ties with ``uniforms[k]`` and writes
    the chosen job to ``out_seq[k]``. Returns the makespan.
    """
    n, m = p.shape
    t = np.zeros(n, dtype=np.int64)
    job_ready = np.zeros(n, dtype=np.int64)
    slot_start = np.zeros((m, n), dtype=np.int64)
    slot_end = np.zeros((m, n), dtype=np.int64)
    slot_count = np.zeros(m, dtype=np.int64)
    for x in range(prefix.shape[0]):
        _place(p, route, prefix[x], t, job_ready, slot_start, slot_end, slot_count, insertion)
    rem = np.zeros(n, dtype=np.int64)
    for j in range(n):
        for i in range(t[j], m):
            rem[j] += p[j, i]
    steps = n * m - prefix.shape[0]
    for k in range(steps):
        best = np.iinfo(np.int64).min
        count = 0
        for j in range(n):
            if t[j] >= m:
                continue
            if rule == MWKR:
                s = rem[j]
            elif rule == SPT:
                s = -p[j, t[j]]
            elif rule == LOPN:
                s = -t[j]
            else:
                s = 0
            if s > best:
                best = s
                count = 1
            elif s == best:
                count += 1
        pick = int(uniforms[k] * count)
        chosen = -1
        for j in range(n):
            if t[j] >= m:
                continue
            if rule == MWKR:
                s = rem[j]
            elif rule == SPT:
                s = -p[j, t[j]]
            elif rule == LOPN:
                s = -t[j]
            else:
                s = 0
            if s == best:
                if pick == 0:
                    chosen = j
                    break
                pick -= 1
        rem[chosen] -= p[chosen, t[chosen]]
        _place(p, route, chosen, t, job_ready, slot_start, slot_end, slot_count, insertion)
        out_seq[k] = chosen
    makespan = 0
    for j in range(n):
        if job_ready[j] > makespan:
            makespan = job_ready[j]
    return makespan


@numba.njit(cache=True)
def _bound(p, route, tail, t, job_ready, mach_ready):
    """Admissible makespan bound for completions of a partial schedule.

    Heads come from replaying each job's remaining chain against the
    machines' ready times; each machine is then relaxed to a preemptive
    one-machine problem with heads and tails, solved exactly by Jackson's
    rule (always run the available operation with the longest tail).
    """
    n, m = p.shape
    head = np.zeros((n, m), dtype=np.int64)
    lb = 0
    for j in range(n):
        h = job_ready[j]
        for i in range(t[j], m):
            a = route[j, i]
            if mach_ready[a] > h:
                h = mach_ready[a]
            head[j, i] = h
            h += p[j, i]
        if h > lb:
            lb = h
    r = np.empty(n, dtype=np.int64)
    q = np.empty(n, dtype=np.int64)
    left = np.empty(n, dtype=np.int64)
    for a in range(m):
        k = 0
        for j in range(n):
            for i in range(t[j], m):
                if route[j, i] == a:
                    r[k] = head[j, i]
                    q[k] = tail[j, i]
                    left[k] = p[j, i]
                    k += 1
                    break
        if k == 0:
            continue
        now = r[0]
        for x in range(1, k):
            if r[x] < now:
                now = r[x]
        done = 0
        while done < k:
            pick = -1
            next_release = np.iinfo(np.int64).max
            for x in range(k):
                if left[x] == 0:
                    continue
                if r[x] <= now:
                    if pick < 0 or q[x] > q[pick]:
                        pick = x
                elif r[x] < next_release:
                    next_release = r[x]
            if pick < 0:
                now = next_release
                continue
            run = left[pick]
            if next_release - now < run:
                run = next_release - now
            now += run
            left[pick] -= run
            if left[pick] == 0:
                done += 1
                if now + q[pick] > lb:
                    lb = now + q[pick]
    return lb


@numba.njit(cache=True)
def _candidates(p, route, t, job_ready, mach_ready, rem_job, n, m, out):
    """Giffler-Thompson conflict set, ordered by earliest start then most work remaining."""
    best_ect = np.iinfo(np.int64).max
    best_mach = -1
    for j in range(n):
        if t[j] >= m:
            continue
        a = route[j, t[j]]
        est = max(job_ready[j], mach_ready[a])
        ect = est + p[j, t[j]]
        if ect < best_ect:
            best_ect = ect
            best_mach = a
    k = 0
    for j in range(n):
        if t[j] >= m or route[j, t[j]] != best_mach:
            continue
        est = max(job_ready[j], mach_ready[best_mach])
        if est < best_ect:
            out[k] = j
            k += 1
    # insertion sort: small est first, then large remaining work
    for x in range(1, k):
        j = out[x]
        ej = max(job_ready[j], mach_ready[best_mach])
        y = x - 1
        while y >= 0:
            o = out[y]
            eo = max(job_ready[o], mach_ready[best_mach])
            if eo > ej or (eo == ej and rem_job[o] < rem_job[j]):
                out[y + 1] = o
                y -= 1
            else:
                break
        out[y + 1] = j
    return k


@numba.njit(cache=True)
def branch_and_bound_search(p, route, best, best_seq, time_limit, node_limit):
    """Depth-first search over active-schedule dispatch prefixes.

    ``best``/``best_seq`` hold the incumbent and are improved in place
    (``best_seq`` must be an array of length ``n*m``). Returns
    ``(best, nodes, completed)``; ``completed`` is False when a time or
    node limit stopped the search.
    """
    n, m = p.shape
    total = n * m
    with numba.objmode(t0="float64"):
        t0 = time.perf_counter()

    tail = np.zeros((n, m), dtype=np.int64)
    for j in range(n):
        acc = 0
        for i in range(m - 1, -1, -1):
            tail[j, i] = acc
            acc += p[j, i]
    t = np.zeros(n, dtype=np.int64)
    job_ready = np.zeros(n, dtype=np.int64)
    mach_ready = np.zeros(m, dtype=np.int64)
    rem_job = np.zeros(n, dtype=np.int64)
    for j in range(n):
        for i in range(m):
            rem_job[j] += p[j, i]

    cand = np.zeros((total, n), dtype=np.int64)
    ncand = np.zeros(total, dtype=np.int64)
    pos = np.zeros(total, dtype=np.int64)
    chosen = np.zeros(total, dtype=np.int64)
    saved_job = np.zeros(total, dtype=np.int64)
    saved_mach = np.zeros(total, dtype=np.int64)

    nodes = 0
    completed = True
    if _bound(p, route, tail, t, job_ready, mach_ready) >= best:
        return best, nodes, completed
    d = 0
    ncand[0] = _candidates(p, route, t, job_ready, mach_ready, rem_job, n, m, cand[0])
    pos[0] = 0
    while True:
        if pos[d] < ncand[d]:
            j = cand[d, pos[d]]
            pos[d] += 1
            nodes += 1
            if nodes % 16384 == 0:
                if node_limit > 0 and nodes >= node_limit:
                    completed = False
                    break
                if time_limit >= 0.0:
                    with numba.objmode(now="float64"):
                        now = time.perf_counter()
                    if now - t0 > time_limit:
                        completed = False
                        break
            i = t[j]
            a = route[j, i]
            saved_job[d] = job_ready[j]
            saved_mach[d] = mach_ready[a]
            chosen[d] = j
            start = max(job_ready[j], mach_ready[a])
            end = start + p[j, i]
            job_ready[j] = end
            mach_ready[a] = end
            rem_job[j] -= p[j, i]
            t[j] = i + 1
            descend = False
            if d + 1 == total:
                ms = 0
                for b in range(m):
                    if mach_ready[b] > ms:
                        ms = mach_ready[b]
                if ms < best:
                    best = ms
                    for x in range(d):
                        best_seq[x] = chosen[x]
                    best_seq[d] = j
            elif _bound(p, route, tail, t, job_ready, mach_ready) < best:
                descend = True
            if descend:
                d += 1
                ncand[d] = _candidates(p, route, t, job_ready, mach_ready, rem_job, n, m, cand[d])
                pos[d] = 0
            else:
                t[j] = i
                rem_job[j] += p[j, i]
                job_ready[j] = saved_job[d]
                mach_ready[a] = saved_mach[d]
        else:
            if d == 0:
                break
            d -= 1
            j = chosen[d]
            i = t[j] - 1
            a = route[j, i]
            t[j] = i
            rem_job[j] += p[j, i]
            job_ready[j] = saved_job[d]
            mach_ready[a] = saved_mach[d]
    return best, nodes, completed
