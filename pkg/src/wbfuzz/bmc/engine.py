"""Per-goal solving and the incremental unwinding schedule."""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..instrument import COVER_ERROR, ERROR_CALL, InstrumentedProgram
from ..interp import Trace, execute
from ..sat import UNKNOWN, UNSAT, solve_cnf, to_dimacs
from ..sat.bitblast import bitblast_terms, decode
from ..sat.terms import evaluate
from .encode import SsaFormula, encode_ssa
from .passes import slice_formula
from .unroll import unroll

MODEL, UNREACHABLE = "model", "unreachable-up-to"


@dataclass
class BmcConfig:
    k_start: int = 1
    k_step: int = 5
    k_max: Optional[int] = None  # None: no upper bound
    folding: bool = True
    slicing: bool = True
    max_conflicts: Optional[int] = 200_000  # per query
    dump_cnf: Optional[str] = None  # directory receiving one DIMACS file per query

    def __post_init__(self):
        if self.k_step < 1:
            raise ValueError("k_step must be at least 1")
        if self.k_start < 1:
            raise ValueError("k_start must be at least 1")


@dataclass
class Verdict:
    kind: str  # model, unreachable-up-to, unknown
    goal: int
    k: int
    tape: Optional[tuple] = None
    trace: Optional[Trace] = None
    reason: str = ""

    @property
    def is_model(self) -> bool:
        return self.kind == MODEL


@dataclass
class BmcResult:
    tests: list = field(default_factory=list)  # model verdicts
    unreachable: dict = field(default_factory=dict)  # goal -> k
    unknown: dict = field(default_factory=dict)  # goal -> reason
    hints: dict = field(default_factory=dict)
    bounds: list = field(default_factory=list)  # every k that was encoded
    complete: bool = False  # no path was cut by an unwinding assumption
    spent: float = 0.0


def tape_from_model(f: SsaFormula, goal: int, values: dict) -> Optional[tuple]:
    """Inputs consumed along the model's path, up to the first instance of ``goal``."""
    insts = f.instances.get(goal, [])
    roots = [s.guard for s in f.nondet] + [i.guard for i in insts]
    memo = evaluate(roots, values)
    horizon = None
    for inst in insts:
        if memo[inst.guard.id]:
            horizon = inst.horizon
            break
    if horizon is None:
        return None
    tape = []
    for s in f.nondet[:horizon]:
        if memo[s.guard.id]:
            tape.append((s.type, s.type.wrap(values.get(s.index, 0))))
    return tuple(tape)


def solve_goal(f: SsaFormula, goal: int, prog: InstrumentedProgram, *, slicing: bool = True,
               backend: Callable = solve_cnf, max_conflicts: Optional[int] = None,
               deadline: Optional[float] = None, dump_cnf: Optional[str] = None) -> Verdict:
    target = f.target(goal)
    tb = f.builder
    if goal in f.unsat_goals or target is tb.false:
        return Verdict(UNREACHABLE, goal, f.k)
    if slicing:
        work = slice_formula(f, goal)
        extra: list = []
    else:
        work = f
        extra = [t for _, t in f.defs] + [s.guard for s in f.nondet]
    cnf = bitblast_terms(target, extra)
    if dump_cnf:
        os.makedirs(dump_cnf, exist_ok=True)
        path = os.path.join(dump_cnf, f"k{f.k}-goal{goal}.cnf")
        with open(path, "w") as fh:
            fh.write(to_dimacs(cnf, (f"GOAL-{goal} at bound {f.k}",)))
    res = backend(cnf, max_conflicts=max_conflicts, deadline=deadline)
    if res.status == UNSAT:
        return Verdict(UNREACHABLE, goal, f.k)
    if res.status == UNKNOWN:
        return Verdict(UNKNOWN, goal, f.k, reason=f"resource:{res.reason}")
    values = decode(cnf, res.model)
    for s in work.nondet:
        if s.sliced:
            values[s.index] = 0
    tape = tape_from_model(f, goal, values)
    if tape is None:
        return Verdict(UNKNOWN, goal, f.k, reason="replay-mismatch")
    trace = execute(prog, tape)
    if goal not in trace.goals_hit:
        return Verdict(UNKNOWN, goal, f.k, reason="replay-mismatch")
    return Verdict(MODEL, goal, f.k, tape, trace)


def encode_at(prog: InstrumentedProgram, k: int, folding: bool = True) -> SsaFormula:
    f = encode_ssa(unroll(prog, k), simplify=folding)
    return f


def _cuts_feasible(f: SsaFormula, max_conflicts, deadline) -> Optional[bool]:
    if not f.cut_guards:
        return False
    tb = f.builder
    target = tb.any_of(f.cut_guards)
    if target is tb.false:
        return False
    res = solve_cnf(bitblast_terms(target), max_conflicts=max_conflicts, deadline=deadline)
    if res.status == UNKNOWN:
        return None
    return res.status != UNSAT


def run_incremental(prog: InstrumentedProgram, goal_table, mode: str, cfg: BmcConfig,
                    budget: float, *, on_bound: Optional[Callable] = None) -> BmcResult:
    """Unwind with bounds k_start, k_start + k_step, ... and solve uncovered goals.

    Models are offered to ``goal_table`` (which replays them) as soon as they
    are found, so later queries skip goals an earlier test already hit.
    """
    result = BmcResult()
    if budget <= 0:
        return result
    start = time.monotonic()
    deadline = start + budget
    if mode == COVER_ERROR:
        targets = [g.id for g in prog.goals if g.kind == ERROR_CALL]
    else:
        targets = [g.id for g in prog.goals]
    consumption: dict = {}
    values: dict = {}
    k = cfg.k_start
    while True:
        pending = [g for g in targets if not goal_table.is_covered(g)]
        if not pending or goal_table.done() or time.monotonic() >= deadline:
            break
        f = encode_at(prog, k, cfg.folding)
        result.bounds.append(k)
        if on_bound is not None:
            on_bound(k, f)
        resolved = True
        for g in pending:
            if goal_table.is_covered(g):
                continue
            if goal_table.done():
                break
            if time.monotonic() >= deadline:
                resolved = False
                break
            v = solve_goal(f, g, prog, slicing=cfg.slicing, max_conflicts=cfg.max_conflicts,
                           deadline=deadline, dump_cnf=cfg.dump_cnf)
            if v.is_model:
                result.tests.append(v)
                result.unreachable.pop(g, None)
                result.unknown.pop(g, None)
                goal_table.offer(v.tape, "bmc")
                consumption[g] = len(v.tape)
                for t, x in v.tape:
                    values.setdefault(t, set()).add(x)
            elif v.kind == UNREACHABLE:
                result.unreachable[g] = k
                goal_table.mark_unreachable(g, k)
            else:
                result.unknown[g] = v.reason
                resolved = False
        if resolved and all(goal_table.is_covered(g) or g in result.unreachable
                            for g in targets):
            feasible = _cuts_feasible(f, cfg.max_conflicts, deadline)
            if feasible is False:
                result.complete = True
                break
        if cfg.k_max is not None and k >= cfg.k_max:
            break
        k = k + cfg.k_step if cfg.k_max is None else min(k + cfg.k_step, cfg.k_max)
    for g in [g for g in result.unreachable if goal_table.is_covered(g)]:
        del result.unreachable[g]
    result.hints = {"consumption": consumption,
                    "values": {t: sorted(v) for t, v in values.items()},
                    "tapes": [v.tape for v in result.tests]}
    result.spent = time.monotonic() - start
    return result
