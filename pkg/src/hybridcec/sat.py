"""CNF encoding and SAT solving.

A cone becomes CNF through the Tseitin transformation (three clauses per AND
gate plus a unit clause asserting the root), so unsatisfiability proves the
root constant zero.  The bundled solver is a deliberately modest CDCL:
two-watched-literal propagation, first-UIP learning, activity-based
branching with phase saving, Luby restarts and periodic learned-clause
reduction.  An external-solver adapter accepts any DIMACS tool with
SAT-competition output, and ``solve_parallel`` supplies a cube-and-conquer
contract on top of the sequential core.
"""

from __future__ import annotations

import heapq
import multiprocessing as mp
import os
import re
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from itertools import product

from .aig import FALSE, Cone

UNASSIGNED = 2


class SatError(Exception):
    """Malformed CNF, model, or external-solver interaction."""


class SolverSpawnError(SatError):
    """The external solver command could not be started."""


class SolverOutputError(SatError):
    """The external solver produced unparseable output."""


class InvalidModelError(SatError):
    """A claimed model does not satisfy the formula."""


@dataclass
class Cnf:
    num_vars: int
    clauses: list[list[int]]
    var_map: dict[int, int] = field(default_factory=dict)  # cone node -> variable

    def validate_model(self, model: tuple[bool, ...]) -> bool:
        if len(model) < self.num_vars:
            return False
        return all(
            any(model[abs(l) - 1] == (l > 0) for l in clause) for clause in self.clauses
        )


@dataclass
class SatBudget:
    max_conflicts: int = 100_000
    max_seconds: float = 60.0

    def __post_init__(self) -> None:
        if self.max_conflicts <= 0 or self.max_seconds <= 0:
            raise SatError("budget limits must be positive")

    def scaled(self, factor: float) -> "SatBudget":
        return SatBudget(int(self.max_conflicts * factor), self.max_seconds * factor)


@dataclass
class SatVerdict:
    kind: str  # "unsat" | "model" | "budget"
    model: tuple[bool, ...] | None = None
    conflicts: int = 0

    UNSAT = "unsat"
    MODEL = "model"
    BUDGET = "budget"

    @property
    def is_unsat(self) -> bool:
        return self.kind == SatVerdict.UNSAT

    @property
    def is_model(self) -> bool:
        return self.kind == SatVerdict.MODEL

    @property
    def is_budget(self) -> bool:
        return self.kind == SatVerdict.BUDGET


# -- Tseitin encoding ----------------------------------------------------------


def tseitin_encode(cone: Cone) -> Cnf:
    """Three clauses per AND gate plus a unit asserting the root true.

    Unsat therefore means the cone root is constant 0, i.e. the pair behind
    the cone is equivalent.
    """
    aig = cone.aig
    root = cone.root
    if root.index == 0:
        # constant root: complementary units when FALSE, a free tautology when TRUE
        if root == FALSE:
            return Cnf(1, [[1], [-1]], {})
        return Cnf(1, [[1]], {})
    var_map = {i: i for i in range(1, aig.num_nodes)}
    clauses: list[list[int]] = []

    def lit(code: int) -> int:
        var = var_map[code >> 1]
        return -var if code & 1 else var

    for i in aig.live_and_indices():
        o = var_map[i]
        a = lit(aig._fanin0[i])
        b = lit(aig._fanin1[i])
        clauses.append([-o, a])
        clauses.append([-o, b])
        clauses.append([o, -a, -b])
    clauses.append([lit(root.code)])
    return Cnf(aig.num_nodes - 1, clauses, var_map)


def model_to_assignment(model: tuple[bool, ...], cone: Cone) -> tuple[int, ...]:
    """Cone PI assignment extracted from a model over the encoding variables."""
    assignment = []
    for pos in range(cone.aig.num_pis):
        var = pos + 1  # PIs occupy the first variables by construction
        if var > len(model):
            raise SatError(f"model does not cover PI variable {var}")
        assignment.append(1 if model[var - 1] else 0)
    return tuple(assignment)


# -- DIMACS ---------------------------------------------------------------------


def to_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> Cnf:
    num_vars = None
    expected = 0
    clauses: list[list[int]] = []
    pending: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            m = re.fullmatch(r"p\s+cnf\s+(\d+)\s+(\d+)", line)
            if not m:
                raise SatError(f"line {lineno}: malformed problem line {line!r}")
            num_vars, expected = int(m.group(1)), int(m.group(2))
            continue
        if num_vars is None:
            raise SatError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            l = int(tok)
            if l == 0:
                clauses.append(pending)
                pending = []
            else:
                if abs(l) > num_vars:
                    raise SatError(f"line {lineno}: literal {l} out of range")
                pending.append(l)
    if pending:
        raise SatError("unterminated final clause")
    if num_vars is None:
        raise SatError("missing problem line")
    if len(clauses) != expected:
        raise SatError(f"header announces {expected} clauses, found {len(clauses)}")
    return Cnf(num_vars, clauses)


# -- CDCL core -------------------------------------------------------------------


class _Solver:
    """Array-based CDCL over literals encoded as 2*var (+1 when negated).

    Binary clauses live in dedicated implication lists so the common
    two-literal Tseitin clauses propagate without touching the clause arena.
    """

    def __init__(self, num_vars: int, decay: float = 0.9, restart_base: int = 64):
        n = num_vars
        self.nvars = n
        self.decay = decay
        self.restart_base = restart_base
        self.assigns = bytearray([UNASSIGNED] * n)
        self.level = [0] * n
        self.reason = [-1] * n
        self.saved = bytearray(n)
        self.activity = [0.0] * n
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(n)]
        heapq.heapify(self.heap)
        self.watches: list[list[int]] = [[] for _ in range(2 * n)]
        self.bins: list[list[int]] = [[] for _ in range(2 * n)]  # (other, ci) flat
        self.clauses: list[list[int]] = []
        self.lbd: list[int] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.units: list[int] = []
        self.ok = True

    def _lit_true(self, l: int) -> bool:
        return self.assigns[l >> 1] == (l & 1) ^ 1

    def _lit_false(self, l: int) -> bool:
        return self.assigns[l >> 1] == (l & 1)

    def add_clause(self, lits_dimacs: list[int]) -> None:
        if not self.ok:
            return
        seen: set[int] = set()
        lits: list[int] = []
        for l in lits_dimacs:
            il = (abs(l) - 1) * 2 + (1 if l < 0 else 0)
            if il ^ 1 in seen:
                return  # tautology
            if il not in seen:
                seen.add(il)
                lits.append(il)
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            self.units.append(lits[0])
            return
        self._attach(lits)

    def _attach(self, lits: list[int], lbd: int = 0) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.lbd.append(lbd)
        if len(lits) == 2:
            # visited when the indexing literal becomes false, like watches
            self.bins[lits[0]].extend((lits[1], ci))
            self.bins[lits[1]].extend((lits[0], ci))
        else:
            # watch lists interleave a cached blocking literal with the index
            self.watches[lits[0]].extend((lits[1], ci))
            self.watches[lits[1]].extend((lits[0], ci))
        return ci

    def _propagate(self) -> int:
        """Returns a conflicting clause index or -1."""
        clauses = self.clauses
        assigns = self.assigns
        watches = self.watches
        bins = self.bins
        trail = self.trail
        level = self.level
        reason = self.reason
        lvl = len(self.trail_lim)
        qhead = self.qhead
        try:
            while qhead < len(trail):
                p = trail[qhead]
                qhead += 1
                false_lit = p ^ 1
                blist = bins[false_lit]
                for t in range(0, len(blist), 2):
                    q = blist[t]
                    val = assigns[q >> 1]
                    if val == (q & 1) ^ 1:
                        continue
                    if val == q & 1:
                        return blist[t + 1]
                    v = q >> 1
                    assigns[v] = (q & 1) ^ 1
                    level[v] = lvl
                    reason[v] = blist[t + 1]
                    trail.append(q)
                ws = watches[false_lit]
                i = j = 0
                n_ws = len(ws)
                while i < n_ws:
                    blocker = ws[i]
                    if assigns[blocker >> 1] == (blocker & 1) ^ 1:
                        ws[j] = blocker
                        ws[j + 1] = ws[i + 1]
                        i += 2
                        j += 2
                        continue
                    ci = ws[i + 1]
                    i += 2
                    lits = clauses[ci]
                    if lits[0] == false_lit:
                        lits[0] = lits[1]
                        lits[1] = false_lit
                    first = lits[0]
                    if assigns[first >> 1] == (first & 1) ^ 1:
                        ws[j] = first
                        ws[j + 1] = ci
                        j += 2
                        continue
                    for k in range(2, len(lits)):
                        lk = lits[k]
                        if assigns[lk >> 1] != lk & 1:  # not false
                            lits[1] = lk
                            lits[k] = false_lit
                            watches[lk].extend((first, ci))
                            break
                    else:
                        ws[j] = first
                        ws[j + 1] = ci
                        j += 2
                        if assigns[first >> 1] == first & 1:  # conflict
                            while i < n_ws:
                                ws[j] = ws[i]
                                j += 1
                                i += 1
                            del ws[j:]
                            return ci
                        v = first >> 1
                        assigns[v] = (first & 1) ^ 1
                        level[v] = lvl
                        reason[v] = ci
                        trail.append(first)
                del ws[j:]
            return -1
        finally:
            self.qhead = qhead

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            scale = 1e-100
            self.activity = [a * scale for a in self.activity]
            self.var_inc *= scale
        if self.assigns[v] == UNASSIGNED:
            heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        learnt = [0]
        seen = bytearray(self.nvars)
        counter = 0
        p = -1
        trail = self.trail
        level = self.level
        idx = len(trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            for q in self.clauses[confl]:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if level[v] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            confl = self.reason[v]
        learnt[0] = p ^ 1
        # clause minimization: drop literals implied by the rest of the clause
        if len(learnt) > 2:
            kept = [learnt[0]]
            for q in learnt[1:]:
                r = self.reason[q >> 1]
                if r < 0:
                    kept.append(q)
                    continue
                for other in self.clauses[r]:
                    ov = other >> 1
                    if not seen[ov] and level[ov] > 0 and other != q ^ 1:
                        kept.append(q)
                        break
            learnt = kept
        if len(learnt) == 1:
            return learnt, 0
        # move a highest-level literal into the second watch position
        max_i = 1
        for i in range(2, len(learnt)):
            if level[learnt[i] >> 1] > level[learnt[max_i] >> 1]:
                max_i = i
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _backtrack(self, target: int) -> None:
        if len(self.trail_lim) <= target:
            return
        bound = self.trail_lim[target]
        assigns = self.assigns
        saved = self.saved
        heap = self.heap
        activity = self.activity
        for l in reversed(self.trail[bound:]):
            v = l >> 1
            saved[v] = (l & 1) ^ 1
            assigns[v] = UNASSIGNED
            heapq.heappush(heap, (-activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[target:]
        self.qhead = len(self.trail)

    def _learn(self, learnt: list[int]) -> None:
        if len(learnt) == 1:
            self._enqueue_root(learnt[0])
            return
        levels = {self.level[l >> 1] for l in learnt}
        ci = self._attach(learnt, len(levels))
        v = learnt[0] >> 1
        self.assigns[v] = (learnt[0] & 1) ^ 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = ci
        self.trail.append(learnt[0])

    def _enqueue_root(self, l: int) -> None:
        v = l >> 1
        self.assigns[v] = (l & 1) ^ 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = -1
        self.trail.append(l)

    def _reduce_db(self, first_learnt: int) -> None:
        locked = {self.reason[l >> 1] for l in self.trail}
        learned = [
            ci
            for ci in range(first_learnt, len(self.clauses))
            if ci not in locked and self.lbd[ci] > 2 and len(self.clauses[ci]) > 2
        ]
        learned.sort(key=lambda ci: (self.lbd[ci], len(self.clauses[ci])))
        drop = set(learned[len(learned) // 2 :])
        if not drop:
            return
        keep_map: dict[int, int] = {}
        new_clauses: list[list[int]] = []
        new_lbd: list[int] = []
        for ci, lits in enumerate(self.clauses):
            if ci in drop:
                continue
            keep_map[ci] = len(new_clauses)
            new_clauses.append(lits)
            new_lbd.append(self.lbd[ci])
        self.clauses = new_clauses
        self.lbd = new_lbd
        self.reason = [keep_map.get(r, -1) if r >= 0 else -1 for r in self.reason]
        self.watches = [[] for _ in range(2 * self.nvars)]
        for blist in self.bins:
            for t in range(1, len(blist), 2):
                blist[t] = keep_map[blist[t]]  # binaries are never dropped
        for ci, lits in enumerate(self.clauses):
            if len(lits) > 2:
                self.watches[lits[0]].extend((lits[1], ci))
                self.watches[lits[1]].extend((lits[0], ci))

    def _decide(self) -> int:
        heap = self.heap
        assigns = self.assigns
        while heap:
            _, v = heapq.heappop(heap)
            if assigns[v] == UNASSIGNED:
                return 2 * v + (0 if self.saved[v] else 1)
        return -1

    def search(self, budget: SatBudget, cancel=None) -> SatVerdict:
        if not self.ok:
            return SatVerdict(SatVerdict.UNSAT)
        for u in self.units:
            if self._lit_false(u):
                return SatVerdict(SatVerdict.UNSAT)
            if not self._lit_true(u):
                self._enqueue_root(u)
        if self._propagate() >= 0:
            return SatVerdict(SatVerdict.UNSAT)
        first_learnt = len(self.clauses)
        max_learnts = max(2000, len(self.clauses))
        conflicts = 0
        deadline = time.monotonic() + budget.max_seconds
        luby_idx = 0
        restart_limit = self.restart_base * _luby(luby_idx)
        restart_conflicts = 0
        var_decay = 1.0 / self.decay
        while True:
            confl = self._propagate()
            if confl >= 0:
                conflicts += 1
                restart_conflicts += 1
                if not self.trail_lim:
                    return SatVerdict(SatVerdict.UNSAT, conflicts=conflicts)
                learnt, back = self._analyze(confl)
                self._backtrack(back)
                self._learn(learnt)
                self.var_inc *= var_decay
                if conflicts % 256 == 0:
                    if conflicts >= budget.max_conflicts:
                        return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
                    if time.monotonic() > deadline:
                        return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
                    if cancel is not None and cancel.is_set():
                        return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
                continue
            if restart_conflicts >= restart_limit:
                restart_conflicts = 0
                luby_idx += 1
                restart_limit = self.restart_base * _luby(luby_idx)
                self._backtrack(0)
                if cancel is not None and cancel.is_set():
                    return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
                continue
            if len(self.clauses) - first_learnt > max_learnts:
                self._reduce_db(first_learnt)
                max_learnts = int(max_learnts * 1.3) + 64
            decision = self._decide()
            if decision < 0:
                model = tuple(bool(self.assigns[v]) for v in range(self.nvars))
                return SatVerdict(SatVerdict.MODEL, model=model, conflicts=conflicts)
            self.trail_lim.append(len(self.trail))
            self._enqueue_root(decision)


def _luby(x: int) -> int:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


class _NumbaSolver:
    """Driver for the compiled search core in ``_satcore``.

    The compiled loop runs in conflict-bounded chunks; between chunks this
    driver enforces wall-clock budgets, polls the cancellation flag, reduces
    the learned-clause database, and compacts the arena when it fills up.
    """

    CHUNK = 2048

    def __init__(self, num_vars: int, decay: float = 0.95, restart_base: int = 128):
        import numpy as np

        from . import _satcore as core

        self.core = core
        self.np = np
        n = num_vars
        self.nvars = n
        self.decay_inv = 1.0 / decay
        self.restart_base = restart_base
        self.lits: list[list[int]] = []  # sanitized initial clauses
        self.units: list[int] = []
        self.ok = True

    def add_clause(self, lits_dimacs: list[int]) -> None:
        if not self.ok:
            return
        seen: set[int] = set()
        lits: list[int] = []
        for l in lits_dimacs:
            il = (abs(l) - 1) * 2 + (1 if l < 0 else 0)
            if il ^ 1 in seen:
                return
            if il not in seen:
                seen.add(il)
                lits.append(il)
        if not lits:
            self.ok = False
            return
        if len(lits) == 1:
            self.units.append(lits[0])
            return
        self.lits.append(lits)

    def _init_state(self) -> None:
        np = self.np
        n = self.nvars
        total = sum(2 + len(c) + (len(c) & 1) for c in self.lits)
        cap = max(1 << 16, total * 3 + 64 * n + 4096)
        self.arena = np.zeros(cap, dtype=np.int32)
        self.wnext = np.zeros(cap, dtype=np.int32)
        self.head = np.zeros(2 * n, dtype=np.int32)
        self.assigns = np.full(n, UNASSIGNED, dtype=np.int8)
        self.saved = np.zeros(n, dtype=np.int8)
        self.level = np.zeros(n, dtype=np.int32)
        self.reason = np.full(n, -1, dtype=np.int32)
        self.trail = np.zeros(n + 1, dtype=np.int32)
        self.trail_lim = np.zeros(n + 2, dtype=np.int32)
        self.cells = np.zeros(16, dtype=np.int64)
        self.fcells = np.array([1.0], dtype=np.float64)
        self.activity = np.zeros(n, dtype=np.float64)
        self.heap = np.arange(n, dtype=np.int32)
        self.heap_pos = np.arange(n, dtype=np.int32)
        self.seen = np.zeros(n, dtype=np.int8)
        self.learnt = np.zeros(n + 1, dtype=np.int32)
        self.lbd_mark = np.zeros(n + 2, dtype=np.int64)
        cells = self.cells
        cells[self.core.H_SIZE] = n
        cells[self.core.RESTART_LIM] = self.restart_base
        top = 0
        arena = self.arena
        for lits in self.lits:
            size = len(lits)
            arena[top] = size
            arena[top + 1] = 0
            arena[top + 2 : top + 2 + size] = lits
            self._attach(top)
            top += 2 + size + (size & 1)
        self.first_learned = top
        cells[self.core.A_TOP] = top

    def _attach(self, cid: int) -> None:
        arena, wnext, head = self.arena, self.wnext, self.head
        for s in (0, 1):
            lit = int(arena[cid + 2 + s])
            wnext[cid + s] = head[lit]
            head[lit] = cid + s + 1

    def _enqueue_root(self, lit: int) -> bool:
        """False on immediate conflict with the existing root assignment."""
        v = lit >> 1
        if self.assigns[v] != UNASSIGNED:
            return self.assigns[v] == (lit & 1) ^ 1
        self.assigns[v] = (lit & 1) ^ 1
        self.level[v] = 0
        self.reason[v] = -1
        self.trail[self.cells[self.core.T_SIZE]] = lit
        self.cells[self.core.T_SIZE] += 1
        return True

    def _reduce_db(self) -> None:
        """Drop half of the weak learned clauses and compact the arena."""
        np = self.np
        core = self.core
        arena = self.arena
        locked = {int(self.reason[int(l) >> 1]) for l in self.trail[: int(self.cells[core.T_SIZE])]}
        offs: list[tuple[int, int, int]] = []  # (offset, lbd, size)
        c = self.first_learned
        top = int(self.cells[core.A_TOP])
        while c < top:
            size = int(arena[c])
            offs.append((c, int(arena[c + 1]), size))
            c += 2 + size + (size & 1)
        removable = [
            (lbd, size, off)
            for off, lbd, size in offs
            if off not in locked and lbd > 2 and size > 2
        ]
        removable.sort()
        drop = {off for _, _, off in removable[len(removable) // 2 :]}
        keep_map: dict[int, int] = {}
        new_top = self.first_learned
        for off, lbd, size in offs:
            if off in drop:
                continue
            span = 2 + size + (size & 1)
            if new_top != off:
                arena[new_top : new_top + span] = arena[off : off + span]
            keep_map[off] = new_top
            new_top += span
        self.cells[core.A_TOP] = new_top
        self.cells[core.LEARNED] = len(offs) - len(drop)
        for v in range(self.nvars):
            r = int(self.reason[v])
            if r >= self.first_learned:
                self.reason[v] = keep_map.get(r, -1)
        # rebuild every watch list; watched positions are unchanged
        self.head[:] = 0
        c = 0
        while c < new_top:
            size = int(arena[c])
            self._attach(c)
            c += 2 + size + (size & 1)

    def _grow_arena(self) -> None:
        np = self.np
        old = self.arena
        cap = old.shape[0] * 2
        self.arena = np.zeros(cap, dtype=np.int32)
        self.arena[: old.shape[0]] = old
        old_w = self.wnext
        self.wnext = np.zeros(cap, dtype=np.int32)
        self.wnext[: old_w.shape[0]] = old_w

    def search(self, budget: SatBudget, cancel=None) -> SatVerdict:
        core = self.core
        if not self.ok:
            return SatVerdict(SatVerdict.UNSAT)
        self._init_state()
        for u in self.units:
            if not self._enqueue_root(u):
                return SatVerdict(SatVerdict.UNSAT)
        args = lambda: (
            self.arena, self.wnext, self.head, self.assigns, self.saved,
            self.level, self.reason, self.trail, self.trail_lim, self.cells,
            self.fcells, self.activity, self.heap, self.heap_pos, self.seen,
            self.learnt, self.lbd_mark,
        )
        if core._propagate(
            self.arena, self.wnext, self.head, self.assigns, self.level,
            self.reason, self.trail, self.cells,
        ) >= 0:
            return SatVerdict(SatVerdict.UNSAT)
        conflicts = 0
        deadline = time.monotonic() + budget.max_seconds
        reduce_limit = 4000
        while True:
            chunk = min(self.CHUNK, budget.max_conflicts - conflicts)
            if chunk <= 0:
                return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
            status, done = core._search_chunk(
                *args(), chunk, self.restart_base, self.decay_inv
            )
            conflicts += int(done)
            if status == core.SAT:
                model = tuple(bool(v) for v in self.assigns)
                return SatVerdict(SatVerdict.MODEL, model=model, conflicts=conflicts)
            if status == core.UNSAT:
                return SatVerdict(SatVerdict.UNSAT, conflicts=conflicts)
            if conflicts >= budget.max_conflicts or time.monotonic() > deadline:
                return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
            if cancel is not None and cancel.is_set():
                return SatVerdict(SatVerdict.BUDGET, conflicts=conflicts)
            if status == core.ARENA_FULL:
                self._reduce_db()
                if self.cells[core.A_TOP] + self.nvars + 4 > self.arena.shape[0]:
                    self._grow_arena()
            elif self.cells[core.LEARNED] > reduce_limit:
                self._reduce_db()
                reduce_limit = int(reduce_limit * 1.3) + 64


def _use_compiled_core() -> bool:
    if os.environ.get("HYBRIDCEC_PURE_PYTHON"):
        return False
    from . import _satcore

    return _satcore.HAVE_NUMBA


def solve(
    cnf: Cnf,
    budget: SatBudget | None = None,
    assumptions: tuple[int, ...] = (),
    cancel=None,
) -> SatVerdict:
    """Complete CDCL; Unsat and Model are definitive, Budget means limits hit.

    Assumptions are DIMACS literals added as units, so an Unsat verdict is
    relative to the assumption cube.  The search runs on the compiled core
    when numba is available and falls back to the pure-Python twin otherwise.
    """
    budget = budget or SatBudget()
    if cnf.num_vars == 0:
        if any(not clause for clause in cnf.clauses):
            return SatVerdict(SatVerdict.UNSAT)
        return SatVerdict(SatVerdict.MODEL, model=())
    solver = _NumbaSolver(cnf.num_vars) if _use_compiled_core() else _Solver(cnf.num_vars)
    for clause in cnf.clauses:
        solver.add_clause(clause)
    for a in assumptions:
        solver.add_clause([a])
    verdict = solver.search(budget, cancel=cancel)
    if verdict.is_model:
        assert verdict.model is not None
        if not cnf.validate_model(verdict.model):
            raise InvalidModelError("internal solver produced an invalid model")
        for a in assumptions:
            if verdict.model[abs(a) - 1] != (a > 0):
                raise InvalidModelError("model violates an assumption")
    return verdict


# -- external solver adapter -----------------------------------------------------


def solve_external(cnf: Cnf, command: str | list[str]) -> SatVerdict:
    """Run a DIMACS solver with SAT-competition output and validate its model."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="hybridcec_", delete=False
    ) as handle:
        handle.write(to_dimacs(cnf))
        path = handle.name
    try:
        try:
            proc = subprocess.run(
                argv + [path], capture_output=True, text=True, check=False
            )
        except OSError as exc:
            raise SolverSpawnError(f"cannot run {argv[0]!r}: {exc}") from exc
        out = proc.stdout
        if "s UNSATISFIABLE" in out:
            return SatVerdict(SatVerdict.UNSAT)
        if "s SATISFIABLE" not in out:
            raise SolverOutputError(
                f"no status line in external solver output (exit {proc.returncode})"
            )
        values: dict[int, bool] = {}
        for line in out.splitlines():
            if not line.startswith("v"):
                continue
            for tok in line[1:].split():
                l = int(tok)
                if l != 0:
                    values[abs(l)] = l > 0
        model = tuple(values.get(v + 1, False) for v in range(cnf.num_vars))
        if not cnf.validate_model(model):
            raise InvalidModelError("external solver model does not satisfy the CNF")
        return SatVerdict(SatVerdict.MODEL, model=model)
    finally:
        os.unlink(path)


# -- cube-and-conquer -------------------------------------------------------------


def cube_variables(cnf: Cnf, k: int) -> list[int]:
    """k branching variables by descending occurrence count, ties by index."""
    counts = [0] * (cnf.num_vars + 1)
    for clause in cnf.clauses:
        for l in clause:
            counts[abs(l)] += 1
    ranked = sorted(range(1, cnf.num_vars + 1), key=lambda v: (-counts[v], v))
    return ranked[: min(k, cnf.num_vars)]


def _cube_worker(cnf, cube, budget, cancel, queue, worker_id):
    try:
        verdict = solve(cnf, budget, assumptions=cube, cancel=cancel)
    except SatError as exc:
        queue.put((worker_id, None, str(exc)))
        return
    queue.put((worker_id, verdict, None))


def solve_parallel(cnf: Cnf, workers: int, budget: SatBudget | None = None) -> SatVerdict:
    """Cube-and-conquer: 2^k assumption cubes over the top-occurrence variables.

    Any model wins and cancels the siblings; Unsat needs every cube refuted.
    The verdict kind is deterministic in (cnf, k) because the cubes cover the
    whole assignment space.
    """
    if workers < 2 or workers & (workers - 1):
        raise SatError("workers must be a power of two, at least 2")
    budget = budget or SatBudget()
    k = workers.bit_length() - 1
    branch = cube_variables(cnf, k)
    cubes = [
        tuple(v if bit else -v for v, bit in zip(branch, bits))
        for bits in product((0, 1), repeat=len(branch))
    ]
    ctx = mp.get_context("fork")
    cancel = ctx.Event()
    queue = ctx.SimpleQueue()
    procs = []
    for w, cube in enumerate(cubes):
        p = ctx.Process(target=_cube_worker, args=(cnf, cube, budget, cancel, queue, w))
        p.start()
        procs.append(p)
    model: SatVerdict | None = None
    budget_hit = False
    error: str | None = None
    for _ in procs:
        _, verdict, err = queue.get()
        if err is not None:
            error = err
        elif verdict.is_model and model is None:
            model = verdict
            cancel.set()  # first model wins; siblings stop at their next poll
        elif verdict.is_budget:
            budget_hit = True
    for p in procs:
        p.join()
    if model is not None:
        assert model.model is not None
        if not cnf.validate_model(model.model):
            raise InvalidModelError("cube worker returned an invalid model")
        return model
    if error is not None:
        raise SatError(error)
    if budget_hit:
        return SatVerdict(SatVerdict.BUDGET)
    return SatVerdict(SatVerdict.UNSAT)
