"""Conflict-driven clause-learning SAT solver.

Two watched literals, first-UIP learning with local minimisation, VSIDS
activities kept in a lazy heap, phase saving, geometric restarts and
LBD-based learnt clause deletion. Literals are encoded internally as
``2*v`` (positive) and ``2*v+1`` (negative).
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Optional

from .cnf import Cnf

SAT, UNSAT, UNKNOWN = "sat", "unsat", "unknown"


@dataclass
class SatResult:
    status: str
    model: Optional[list] = None  # model[v] in {0, 1} for v in 1..var_count
    conflicts: int = 0
    reason: str = ""  # for unknown: which resource ran out

    @property
    def is_sat(self) -> bool:
        return self.status == SAT


@dataclass
class SolverConfig:
    decay: float = 0.95
    restart_first: int = 100
    restart_factor: float = 1.5
    reduce_first: int = 2000
    reduce_inc: int = 300


class Solver:
    def __init__(self, num_vars: int, config: SolverConfig | None = None):
        self.cfg = config or SolverConfig()
        self.n = num_vars
        size = 2 * (num_vars + 1)
        self.vals = [0] * size  # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.watches: list = [[] for _ in range(size)]
        self.activity = [0.0] * (num_vars + 1)
        self.phase = [1] * (num_vars + 1)  # 1 -> try negative literal first
        self.var_inc = 1.0
        self.heap = [(-0.0, v) for v in range(1, num_vars + 1)]
        heapq.heapify(self.heap)
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.learnts: list = []
        self.lbd: dict = {}
        self.ok = True
        self.conflicts = 0

    # ----------------------------------------------------------- clauses

    def add_clause(self, lits) -> bool:
        """Add a DIMACS clause at level 0."""
        if not self.ok:
            return False
        seen = set()
        clause = []
        for d in lits:
            lit = 2 * d if d > 0 else -2 * d + 1
            if lit ^ 1 in seen:
                return True  # tautology
            if lit in seen:
                continue
            val = self.vals[lit]
            if val == 1:
                return True
            if val == -1:
                continue
            seen.add(lit)
            clause.append(lit)
        if not clause:
            self.ok = False
            return False
        if len(clause) == 1:
            self._assign(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
                return False
            return True
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)
        return True

    def _assign(self, lit: int, reason) -> None:
        v = lit >> 1
        self.vals[lit] = 1
        self.vals[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    # ------------------------------------------------------- propagation

    def _propagate(self):
        vals, watches, trail = self.vals, self.watches, self.trail
        level, reason = self.level, self.reason
        lvl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if vals[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if vals[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if vals[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return c
                    v = first >> 1
                    vals[first] = 1
                    vals[first ^ 1] = -1
                    level[v] = lvl
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
        return None

    # ---------------------------------------------------------- analysis

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1)
                         if self.vals[2 * u] == 0]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-act, v))

    def _analyze(self, confl):
        level, reason, trail = self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        seen = bytearray(self.n + 1)
        learnt = [0]
        counter = 0
        p = None
        idx = len(trail) - 1
        c = confl
        while True:
            for q in (c if p is None else c[1:]):
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            c = reason[v]
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            # propagation keeps the implied literal of a reason at c[0]
        learnt[0] = p ^ 1
        # local minimisation: drop literals implied by others in the clause
        in_clause = seen
        for q in learnt[1:]:
            in_clause[q >> 1] = 1
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                out.append(q)
                continue
            for x in r:
                xv = x >> 1
                if xv != q >> 1 and not in_clause[xv] and level[xv] > 0:
                    out.append(q)
                    break
        learnt = out
        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, back, lbd

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        vals, phase, activity, heap = self.vals, self.phase, self.activity, self.heap
        for lit in self.trail[start:]:
            v = lit >> 1
            vals[lit] = 0
            vals[lit ^ 1] = 0
            phase[v] = lit & 1
            self.reason[v] = None
            heapq.heappush(heap, (-activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _decide(self) -> bool:
        heap, vals, activity = self.heap, self.vals, self.activity
        while heap:
            neg_act, v = heapq.heappop(heap)
            if vals[2 * v] != 0 or -neg_act != activity[v]:
                continue
            self.trail_lim.append(len(self.trail))
            self._assign(2 * v + self.phase[v], None)
            return True
        # the lazy heap may have lost entries; fall back to a scan
        for v in range(1, self.n + 1):
            if vals[2 * v] == 0:
                self.trail_lim.append(len(self.trail))
                self._assign(2 * v + self.phase[v], None)
                return True
        return False

    def _reduce(self) -> None:
        locked = set()
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r is not None:
                locked.add(id(r))
        cands = [c for c in self.learnts if self.lbd[id(c)] > 2 and id(c) not in locked]
        cands.sort(key=lambda c: (self.lbd[id(c)], len(c)), reverse=True)
        drop = {id(c) for c in cands[: len(cands) // 2]}
        if not drop:
            return
        for ws in self.watches:
            if ws:
                ws[:] = [c for c in ws if id(c) not in drop]
        keep = []
        for c in self.learnts:
            if id(c) in drop:
                del self.lbd[id(c)]
            else:
                keep.append(c)
        self.learnts = keep

    # -------------------------------------------------------------- solve

    def solve(self, max_conflicts: Optional[int] = None, deadline: Optional[float] = None
              ) -> SatResult:
        if not self.ok:
            return SatResult(UNSAT)
        if self._propagate() is not None:
            self.ok = False
            return SatResult(UNSAT)
        restart_at = self.cfg.restart_first
        restart_conflicts = 0
        next_reduce = self.cfg.reduce_first
        reductions = 0
        inv_decay = 1.0 / self.cfg.decay
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                restart_conflicts += 1
                if not self.trail_lim:
                    self.ok = False
                    return SatResult(UNSAT, conflicts=self.conflicts)
                learnt, back, lbd = self._analyze(confl)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = lbd
                    self._assign(learnt[0], learnt)
                self.var_inc *= inv_decay
                if max_conflicts is not None and self.conflicts >= max_conflicts:
                    self._backtrack(0)
                    return SatResult(UNKNOWN, conflicts=self.conflicts, reason="conflicts")
                if deadline is not None and (self.conflicts & 63) == 0 \
                        and time.monotonic() > deadline:
                    self._backtrack(0)
                    return SatResult(UNKNOWN, conflicts=self.conflicts, reason="time")
                continue
            if restart_conflicts >= restart_at:
                restart_conflicts = 0
                restart_at = int(restart_at * self.cfg.restart_factor)
                self._backtrack(0)
                if len(self.heap) > 4 * self.n + 1000:
                    self.heap = [(-self.activity[u], u) for u in range(1, self.n + 1)
                                 if self.vals[2 * u] == 0]
                    heapq.heapify(self.heap)
                if self.conflicts >= next_reduce:
                    reductions += 1
                    next_reduce = self.conflicts + self.cfg.reduce_first \
                        + self.cfg.reduce_inc * reductions
                    self._reduce()
                continue
            if not self._decide():
                model = [0] * (self.n + 1)
                for v in range(1, self.n + 1):
                    model[v] = 1 if self.vals[2 * v] == 1 else 0
                self._backtrack(0)
                return SatResult(SAT, model, self.conflicts)


class ModelCheckError(AssertionError):
    pass


def solve_cnf(cnf: Cnf, max_conflicts: Optional[int] = None, deadline: Optional[float] = None,
              config: SolverConfig | None = None) -> SatResult:
    """Decide ``cnf``; SAT models are verified against every clause."""
    s = Solver(cnf.var_count, config)
    for c in cnf.clauses:
        if not s.add_clause(c):
            return SatResult(UNSAT)
    res = s.solve(max_conflicts, deadline)
    if res.status == SAT and not cnf.check(res.model):
        raise ModelCheckError("solver returned an assignment that violates a clause")
    return res
