"""Compiled CDCL search core.

Same algorithm as the pure-Python solver in ``sat``: two-watched-literal
propagation, first-UIP learning with local minimization, VSIDS with phase
saving, Luby restarts.  All solver state lives in flat numpy arrays so the
search loop can run under numba.  The search is chunked: the compiled loop
returns to Python every few thousand conflicts, where wall-clock budgets,
cancellation flags, and learned-clause reduction are handled.

Clause arena layout (all int32, clause offsets kept even):
    [size, lbd, lit0, lit1, ..., pad?]   next clause at offset+2+size+(size&1)
Watch slots are ``offset`` (watches lit0) and ``offset+1`` (watches lit1);
``wnext`` holds singly-linked successor slots per literal list.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


UNASSIGNED = 2

# cells indices
T_SIZE = 0  # trail size
QHEAD = 1
LEVEL = 2  # current decision level
A_TOP = 3  # arena top
H_SIZE = 4  # heap size
LEARNED = 5  # learned clause count
SINCE_RESTART = 6
RESTART_LIM = 7
LUBY_IDX = 8
STAMP = 9  # lbd stamp counter

# chunk return statuses
CHUNK_DONE = 0
SAT = 1
UNSAT = 2
ARENA_FULL = 3


@njit(cache=True)
def _heap_up(heap, heap_pos, activity, i):
    v = heap[i]
    a = activity[v]
    while i > 0:
        parent = (i - 1) >> 1
        pv = heap[parent]
        if activity[pv] >= a:
            break
        heap[i] = pv
        heap_pos[pv] = i
        i = parent
    heap[i] = v
    heap_pos[v] = i


@njit(cache=True)
def _heap_down(heap, heap_pos, activity, hsize, i):
    v = heap[i]
    a = activity[v]
    while True:
        left = 2 * i + 1
        if left >= hsize:
            break
        right = left + 1
        child = left
        if right < hsize and activity[heap[right]] > activity[heap[left]]:
            child = right
        cv = heap[child]
        if activity[cv] <= a:
            break
        heap[i] = cv
        heap_pos[cv] = i
        i = child
    heap[i] = v
    heap_pos[v] = i


@njit(cache=True)
def _heap_insert(heap, heap_pos, activity, cells, v):
    if heap_pos[v] >= 0:
        return
    i = cells[H_SIZE]
    heap[i] = v
    heap_pos[v] = i
    cells[H_SIZE] = i + 1
    _heap_up(heap, heap_pos, activity, i)


@njit(cache=True)
def _propagate(arena, wnext, head, assigns, level, reason, trail, cells):
    """Returns a conflicting clause offset, or -1."""
    lvl = cells[LEVEL]
    while cells[QHEAD] < cells[T_SIZE]:
        p = trail[cells[QHEAD]]
        cells[QHEAD] += 1
        fl = p ^ 1
        prev_slot = -1
        slot = head[fl] - 1
        while slot >= 0:
            which = slot & 1
            cid = slot - which
            nxt = wnext[slot] - 1
            other = arena[cid + 2 + (which ^ 1)]
            aval = assigns[other >> 1]
            if aval == (other & 1) ^ 1:  # satisfied by the other watch
                prev_slot = slot
                slot = nxt
                continue
            size = arena[cid]
            found = -1
            for k in range(2, size):
                lk = arena[cid + 2 + k]
                if assigns[lk >> 1] != lk & 1:  # not false
                    found = k
                    break
            if found >= 0:
                lk = arena[cid + 2 + found]
                arena[cid + 2 + found] = arena[cid + 2 + which]
                arena[cid + 2 + which] = lk
                if prev_slot < 0:
                    head[fl] = nxt + 1
                else:
                    wnext[prev_slot] = nxt + 1
                wnext[slot] = head[lk]
                head[lk] = slot + 1
                slot = nxt
                continue
            if aval == other & 1:  # conflict
                return cid
            v = other >> 1
            assigns[v] = (other & 1) ^ 1
            level[v] = lvl
            reason[v] = cid
            trail[cells[T_SIZE]] = other
            cells[T_SIZE] += 1
            prev_slot = slot
            slot = nxt
    return -1


@njit(cache=True)
def _analyze(
    confl,
    arena,
    assigns,
    level,
    reason,
    trail,
    cells,
    seen,
    learnt,
    activity,
    heap,
    heap_pos,
    fcells,
):
    """First-UIP learning with local minimization; returns (size, backjump)."""
    cur_level = cells[LEVEL]
    counter = 0
    p = -1
    idx = cells[T_SIZE] - 1
    lsize = 1
    var_inc = fcells[0]
    nvars = assigns.shape[0]
    while True:
        size = arena[confl]
        for k in range(size):
            q = arena[confl + 2 + k]
            if q == p:
                continue
            v = q >> 1
            if seen[v] == 0 and level[v] > 0:
                seen[v] = 1
                act = activity[v] + var_inc
                activity[v] = act
                if act > 1e100:
                    for u in range(nvars):
                        activity[u] *= 1e-100
                    var_inc *= 1e-100
                if heap_pos[v] >= 0:
                    _heap_up(heap, heap_pos, activity, heap_pos[v])
                if level[v] >= cur_level:
                    counter += 1
                else:
                    learnt[lsize] = q
                    lsize += 1
        while seen[trail[idx] >> 1] == 0:
            idx -= 1
        p = trail[idx]
        idx -= 1
        seen[p >> 1] = 0
        counter -= 1
        if counter == 0:
            break
        confl = reason[p >> 1]
    learnt[0] = p ^ 1
    fcells[0] = var_inc
    if lsize > 2:
        # drop literals whose reason clause stays inside the learnt set
        kept = 1
        for t in range(1, lsize):
            q = learnt[t]
            r = reason[q >> 1]
            keep = r < 0
            if not keep:
                rs = arena[r]
                for k in range(rs):
                    other = arena[r + 2 + k]
                    if other != q ^ 1 and seen[other >> 1] == 0 and level[other >> 1] > 0:
                        keep = True
                        break
            if keep:
                learnt[kept] = q
                kept += 1
            else:
                seen[q >> 1] = 0
        lsize = kept
    for t in range(1, lsize):
        seen[learnt[t] >> 1] = 0
    if lsize == 1:
        return 1, 0
    max_i = 1
    for t in range(2, lsize):
        if level[learnt[t] >> 1] > level[learnt[max_i] >> 1]:
            max_i = t
    tmp = learnt[1]
    learnt[1] = learnt[max_i]
    learnt[max_i] = tmp
    return lsize, level[learnt[1] >> 1]


@njit(cache=True)
def _backtrack(assigns, saved, trail, trail_lim, cells, heap, heap_pos, activity, target):
    if cells[LEVEL] <= target:
        return
    bound = trail_lim[target]
    i = cells[T_SIZE] - 1
    while i >= bound:
        lit = trail[i]
        v = lit >> 1
        saved[v] = (lit & 1) ^ 1
        assigns[v] = UNASSIGNED
        _heap_insert(heap, heap_pos, activity, cells, v)
        i -= 1
    cells[T_SIZE] = bound
    cells[QHEAD] = bound
    cells[LEVEL] = target


@njit(cache=True)
def _luby(x):
    size = 1
    seq = 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return 1 << seq


@njit(cache=True)
def _search_chunk(
    arena,
    wnext,
    head,
    assigns,
    saved,
    level,
    reason,
    trail,
    trail_lim,
    cells,
    fcells,
    activity,
    heap,
    heap_pos,
    seen,
    learnt,
    lbd_mark,
    max_conflicts,
    restart_base,
    decay_inv,
):
    """Run up to max_conflicts conflicts; returns (status, conflicts_done)."""
    conflicts = 0
    nvars = assigns.shape[0]
    capacity = arena.shape[0]
    while True:
        confl = _propagate(arena, wnext, head, assigns, level, reason, trail, cells)
        if confl >= 0:
            conflicts += 1
            if cells[LEVEL] == 0:
                return UNSAT, conflicts
            lsize, bj = _analyze(
                confl, arena, assigns, level, reason, trail, cells, seen,
                learnt, activity, heap, heap_pos, fcells,
            )
            _backtrack(assigns, saved, trail, trail_lim, cells, heap, heap_pos, activity, bj)
            if lsize == 1:
                lit = learnt[0]
                v = lit >> 1
                assigns[v] = (lit & 1) ^ 1
                level[v] = cells[LEVEL]
                reason[v] = -1
                trail[cells[T_SIZE]] = lit
                cells[T_SIZE] += 1
            else:
                # LBD: count distinct levels with a stamp array
                cells[STAMP] += 1
                stamp = cells[STAMP]
                lbd = 0
                for t in range(lsize):
                    lv = level[learnt[t] >> 1]
                    if lbd_mark[lv] != stamp:
                        lbd_mark[lv] = stamp
                        lbd += 1
                c = cells[A_TOP]
                arena[c] = lsize
                arena[c + 1] = lbd
                for t in range(lsize):
                    arena[c + 2 + t] = learnt[t]
                cells[A_TOP] = c + 2 + lsize + (lsize & 1)
                cells[LEARNED] += 1
                wnext[c] = head[learnt[0]]
                head[learnt[0]] = c + 1
                wnext[c + 1] = head[learnt[1]]
                head[learnt[1]] = c + 2
                lit = learnt[0]
                v = lit >> 1
                assigns[v] = (lit & 1) ^ 1
                level[v] = cells[LEVEL]
                reason[v] = c
                trail[cells[T_SIZE]] = lit
                cells[T_SIZE] += 1
            fcells[0] *= decay_inv
            cells[SINCE_RESTART] += 1
            if cells[A_TOP] + nvars + 4 > capacity:
                return ARENA_FULL, conflicts
            if conflicts >= max_conflicts:
                return CHUNK_DONE, conflicts
            continue
        if cells[SINCE_RESTART] >= cells[RESTART_LIM]:
            cells[SINCE_RESTART] = 0
            cells[LUBY_IDX] += 1
            cells[RESTART_LIM] = restart_base * _luby(cells[LUBY_IDX])
            _backtrack(assigns, saved, trail, trail_lim, cells, heap, heap_pos, activity, 0)
            continue
        decision = -1
        while cells[H_SIZE] > 0:
            v = heap[0]
            hs = cells[H_SIZE] - 1
            last = heap[hs]
            heap[0] = last
            heap_pos[last] = 0
            heap_pos[v] = -1
            cells[H_SIZE] = hs
            if hs > 0:
                _heap_down(heap, heap_pos, activity, hs, 0)
            if assigns[v] == UNASSIGNED:
                decision = 2 * v + (0 if saved[v] else 1)
                break
        if decision < 0:
            return SAT, conflicts
        trail_lim[cells[LEVEL]] = cells[T_SIZE]
        cells[LEVEL] += 1
        v = decision >> 1
        assigns[v] = (decision & 1) ^ 1
        level[v] = cells[LEVEL]
        reason[v] = -1
        trail[cells[T_SIZE]] = decision
        cells[T_SIZE] += 1
