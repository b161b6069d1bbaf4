"""Coverage goals and control-flow graphs over the lowered tree.

Every decision edge gets one numbered goal (``GOAL-N``): both arms of each
``if``, loop-enter and loop-exit of each loop, each case label plus the
default edge of each switch. In cover-error mode every call to the error
function additionally gets an error-call goal, numbered after all
decision goals so decision ids do not depend on the mode.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .frontend import ast as A

COVER_ERROR = "cover-error"
COVER_BRANCHES = "cover-branches"
MODES = (COVER_ERROR, COVER_BRANCHES)

THEN, ELSE = "then-edge", "else-edge"
LOOP_ENTER, LOOP_EXIT = "loop-enter", "loop-exit"
SWITCH_CASE, SWITCH_DEFAULT = "switch-case", "switch-default"
ERROR_CALL = "error-call"


@dataclass(frozen=True)
class Goal:
    id: int
    kind: str
    function: str
    line: int
    col: int
    origin: tuple
    label: Optional[int] = None  # case value for switch-case goals

    @property
    def name(self) -> str:
        return f"GOAL-{self.id}"


@dataclass
class BasicBlock:
    id: int
    stmts: list = field(default_factory=list)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    role: Optional[tuple] = None  # (origin, arm) for decision and error edges
    goal: Optional[int] = None


@dataclass
class Cfg:
    function: str
    blocks: list
    edges: list
    entry: int
    exit: int

    def successors(self, block: int) -> list[Edge]:
        return [e for e in self.edges if e.src == block]

    def reachable(self) -> set[int]:
        seen = {self.entry}
        stack = [self.entry]
        while stack:
            b = stack.pop()
            for e in self.successors(b):
                if e.dst not in seen:
                    seen.add(e.dst)
                    stack.append(e.dst)
        return seen

    def decision_blocks(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {}
        for e in self.edges:
            if e.role is not None and e.role[1] != "error":
                out.setdefault(e.src, []).append(e)
        return out


class _CfgBuilder:
    def __init__(self, name: str, goal_of: Optional[dict]):
        self.name = name
        self.goal_of = goal_of or {}
        self.blocks: list[BasicBlock] = []
        self.edges: list[Edge] = []
        self.terminals: list[tuple[int, Optional[tuple]]] = []
        self.loops: list[tuple[int, int]] = []  # (continue target, break target)
        self.breaks: list[int] = []  # innermost break target (loop or switch)
        self.cur: Optional[int] = None

    def new(self) -> int:
        b = BasicBlock(len(self.blocks))
        self.blocks.append(b)
        return b.id

    def edge(self, src: int, dst: int, role: Optional[tuple] = None) -> None:
        self.edges.append(Edge(src, dst, role, self.goal_of.get(role)))

    def ensure(self) -> int:
        if self.cur is None:
            self.cur = self.new()  # unreachable code still gets a block
        return self.cur

    def goto(self, dst: int) -> None:
        if self.cur is not None:
            self.edge(self.cur, dst)
        self.cur = None

    def build(self, fn: A.FunctionDef) -> Cfg:
        entry = self.new()
        self.cur = entry
        self.stmts(fn.body.stmts)
        if self.cur is not None:
            self.terminals.append((self.cur, None))
        if len(self.terminals) == 1 and self.terminals[0][1] is None:
            exit_ = self.terminals[0][0]
        elif not self.terminals:
            exit_ = self.new()
        else:
            exit_ = self.new()
            for b, role in self.terminals:
                self.edge(b, exit_, role)
        return Cfg(self.name, self.blocks, self.edges, entry, exit_)

    def stmts(self, stmts) -> None:
        for s in stmts:
            self.stmt(s)

    def stmt(self, s) -> None:
        if isinstance(s, A.Block):
            self.stmts(s.stmts)
        elif isinstance(s, A.If):
            src = self.ensure()
            self.blocks[src].stmts.append(s.cond)
            then_b = self.new()
            join = self.new()
            self.edge(src, then_b, (s.origin, "then"))
            self.cur = then_b
            self.stmt(s.then)
            self.goto(join)
            if s.else_ is not None:
                else_b = self.new()
                self.edge(src, else_b, (s.origin, "else"))
                self.cur = else_b
                self.stmt(s.else_)
                self.goto(join)
            else:
                self.edge(src, join, (s.origin, "else"))
            # keep block ids in entry/then/else/join order
            self._move_to_end(join)
            self.cur = len(self.blocks) - 1
        elif isinstance(s, A.Loop):
            self.loop(s)
        elif isinstance(s, A.Switch):
            self.switch(s)
        elif isinstance(s, A.Break):
            self.ensure()
            self.goto(self.breaks[-1])
        elif isinstance(s, A.Continue):
            self.ensure()
            self.goto(self.loops[-1][0])
        elif isinstance(s, (A.Return, A.Abort, A.Exit)):
            b = self.ensure()
            self.blocks[b].stmts.append(s)
            self.terminals.append((b, None))
            self.cur = None
        elif isinstance(s, A.ErrorCall):
            b = self.ensure()
            self.blocks[b].stmts.append(s)
            self.terminals.append((b, (s.origin, "error")))
            self.cur = None
        else:
            self.blocks[self.ensure()].stmts.append(s)

    def _move_to_end(self, block_id: int) -> None:
        """Renumber ``block_id`` to be the newest block."""
        last = len(self.blocks) - 1
        if block_id == last:
            return
        order = [b for b in range(len(self.blocks)) if b != block_id] + [block_id]
        remap = {old: new for new, old in enumerate(order)}
        self.blocks = [self.blocks[old] for old in order]
        for new, b in enumerate(self.blocks):
            b.id = new
        self.edges = [Edge(remap[e.src], remap[e.dst], e.role, e.goal) for e in self.edges]
        self.terminals = [(remap[b], r) for b, r in self.terminals]
        self.loops = [(remap[c], remap[b]) for c, b in self.loops]
        self.breaks = [remap[b] for b in self.breaks]
        if self.cur is not None:
            self.cur = remap[self.cur]

    def loop(self, s: A.Loop) -> None:
        exit_b = self.new()
        body_b = self.new()
        head = self.new()
        cont = self.new() if s.step else head
        if s.do_while:
            self.goto(body_b)
        else:
            self.goto(head)
        # condition evaluation
        self.cur = head
        self.stmts(s.prelude)
        cond_b = self.ensure()
        self.blocks[cond_b].stmts.append(s.cond)
        self.edge(cond_b, body_b, (s.origin, "enter"))
        self.edge(cond_b, exit_b, (s.origin, "exit"))
        # body
        self.loops.append((cont, exit_b))
        self.breaks.append(exit_b)
        self.cur = body_b
        self.stmts(s.body.stmts)
        self.breaks.pop()
        self.loops.pop()
        if s.step:
            self.goto(cont)
            self.cur = cont
            self.stmts(s.step)
        self.goto(head)
        self._move_to_end(exit_b)
        self.cur = len(self.blocks) - 1

    def switch(self, s: A.Switch) -> None:
        src = self.ensure()
        self.blocks[src].stmts.append(s.tag)
        after = self.new()
        section_blocks = [self.new() for _ in s.sections]
        for sec, b in zip(s.sections, section_blocks):
            for label in sec.labels:
                arm = "default" if label is None else ("case", label)
                self.edge(src, b, (s.origin, arm))
        if not s.has_default:
            self.edge(src, after, (s.origin, "default"))
        self.breaks.append(after)
        self.cur = None
        for sec, b in zip(s.sections, section_blocks):
            if self.cur is not None:
                self.edge(self.cur, b)  # fallthrough
            self.cur = b
            self.stmts(sec.body)
        self.breaks.pop()
        self.goto(after)
        self._move_to_end(after)
        self.cur = len(self.blocks) - 1


def build_cfg(ast: A.Ast, goal_of: Optional[dict] = None) -> dict[str, Cfg]:
    """One CFG per function; decision edges carry goals when ``goal_of`` is given."""
    return {f.name: _CfgBuilder(f.name, goal_of).build(f) for f in ast.functions}


# ------------------------------------------------------------------- goals


def _number_goals(ast: A.Ast, mode: str) -> list[Goal]:
    goals: list[Goal] = []
    errors: list[tuple] = []

    def add(kind, fn, s, arm, label=None):
        goals.append(Goal(len(goals), kind, fn, s.loc.line, s.loc.col, (s.origin, arm), label))

    for fn in ast.functions:
        for s in A.walk_stmts(fn.body):
            if isinstance(s, A.If):
                add(THEN, fn.name, s, "then")
                add(ELSE, fn.name, s, "else")
            elif isinstance(s, A.Loop):
                add(LOOP_ENTER, fn.name, s, "enter")
                add(LOOP_EXIT, fn.name, s, "exit")
            elif isinstance(s, A.Switch):
                for sec in s.sections:
                    for label in sec.labels:
                        if label is None:
                            add(SWITCH_DEFAULT, fn.name, s, "default")
                        else:
                            add(SWITCH_CASE, fn.name, s, ("case", label), label)
                if not s.has_default:
                    add(SWITCH_DEFAULT, fn.name, s, "default")
            elif isinstance(s, A.ErrorCall):
                errors.append((fn.name, s))
    if mode == COVER_ERROR:
        for fn_name, s in errors:
            add(ERROR_CALL, fn_name, s, "error")
    return goals


@dataclass
class InstrumentedProgram:
    ast: A.Ast
    mode: str
    goals: tuple
    cfgs: dict
    source_name: str = "<input>"
    goal_of: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def goal_count(self) -> int:
        return len(self.goals)

    @property
    def error_goals(self) -> list[int]:
        return [g.id for g in self.goals if g.kind == ERROR_CALL]

    @property
    def decision_goals(self) -> list[int]:
        return [g.id for g in self.goals if g.kind != ERROR_CALL]

    def with_ast(self, ast: A.Ast) -> "InstrumentedProgram":
        """Same goals hosted on another tree with the same origins (e.g. the
        unlowered parse), for differential execution."""
        return InstrumentedProgram(ast, self.mode, self.goals, self.cfgs, self.source_name,
                                   self.goal_of)

    def dump_goals(self) -> str:
        return "".join(f"{g.name} {self.source_name}:{g.line}:{g.col} {g.kind}\n"
                       for g in self.goals)


def inject_goals(ast: A.Ast, mode: str = COVER_BRANCHES, source_name: str = "<input>"
                 ) -> InstrumentedProgram:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not ast.lowered:
        raise ValueError("inject_goals expects a lowered tree")
    goals = _number_goals(ast, mode)
    goal_of = {g.origin: g.id for g in goals}
    cfgs = build_cfg(ast, goal_of)
    return InstrumentedProgram(ast, mode, tuple(goals), cfgs, source_name, goal_of)
