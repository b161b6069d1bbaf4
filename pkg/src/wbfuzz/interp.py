"""Concrete execution of MiniC programs against an input tape.

The tree (lowered or as parsed) is compiled once into Python closures;
each run then only allocates a small context. Both forms share one
semantics, so the lowered program can be checked against the parse.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .frontend import ast as A
from .frontend import build as B
from .frontend.inttypes import TypeDesc
from .frontend.semantics import DivisionByZero, c_div, c_rem, shift
from .instrument import InstrumentedProgram

DEFAULT_STEP_LIMIT = 10 ** 7

EXITED = "exited"
ERROR = "error"
TAPE_EXHAUSTED = "tape-exhausted"
STEP_LIMIT = "step-limit"
TRAP = "trap"
ABORTED = "abort"

_BRK, _CONT, _RET = 1, 2, 3


@dataclass
class Trace:
    status: str
    exit_code: Optional[int] = None
    goals_hit: list = field(default_factory=list)
    error_reached: bool = False
    inputs_consumed: int = 0
    input_types: list = field(default_factory=list)
    input_values: list = field(default_factory=list)
    input_lines: list = field(default_factory=list)
    decisions: list = field(default_factory=list)  # (origin, arm, line)
    requested_type: Optional[TypeDesc] = None  # set when the tape ran out
    steps: int = 0
    input_marks: list = field(default_factory=list)  # decisions taken before each input

    def describe_status(self) -> str:
        if self.status == EXITED:
            return f"exited({self.exit_code})"
        return self.status


class _Halt(Exception):
    def __init__(self, status: str, code: Optional[int] = None):
        self.status = status
        self.code = code


class _Ctx:
    __slots__ = ("g", "tape", "pos", "seen", "hits", "decisions", "record", "steps",
                 "limit", "ret", "hole", "on_exhaust", "types", "values", "lines",
                 "requested", "funcs", "marks")

    def hit(self, gid) -> None:
        if gid is not None and gid not in self.seen:
            self.seen.add(gid)
            self.hits.append(gid)

    def read(self, t: TypeDesc, line: int) -> int:
        if self.pos < len(self.tape):
            item = self.tape[self.pos]
        else:
            item = self.on_exhaust(t) if self.on_exhaust is not None else None
            if item is None:
                self.requested = t
                raise _Halt(TAPE_EXHAUSTED)
        self.pos += 1
        raw = item[1] if isinstance(item, tuple) else item
        v = t.wrap(raw)
        self.types.append(t)
        self.values.append(v)
        self.lines.append(line)
        self.marks.append(len(self.decisions))
        return v


def _step_overflow(c: _Ctx) -> None:
    raise _Halt(STEP_LIMIT)


# ------------------------------------------------------------------ compiler


def _converter(src: Optional[TypeDesc], dst: TypeDesc):
    """Return None when no conversion is needed, else a one-argument function."""
    if src == dst:
        return None
    if dst.is_bool:
        return lambda v: 1 if v else 0
    if src is not None and not src.is_bool and dst.contains(src.min) and dst.contains(src.max):
        return None
    if src is not None and src.is_bool:
        return None
    mask = dst.mask
    if dst.signed:
        half = 1 << (dst.width - 1)
        return lambda v: ((v + half) & mask) - half
    return lambda v: v & mask


class _Compiler:
    def __init__(self, ast: A.Ast, goal_of: dict):
        self.ast = ast
        self.goal_of = goal_of
        self.funcs: dict = {}

    def goal(self, origin, arm):
        return self.goal_of.get((origin, arm))

    # ----------------------------------------------------------- expressions

    def expr(self, e) -> Callable:
        m = getattr(self, "e_" + type(e).__name__)
        return m(e)

    def e_IntLit(self, e):
        v = e.type.convert(e.value)
        return lambda c, fr: v

    def e_VarRef(self, e):
        slot = e.sym.slot
        if e.sym.is_global:
            return lambda c, fr: c.g[slot]
        return lambda c, fr: fr[slot]

    def _array(self, sym):
        slot = sym.slot
        if sym.is_global:
            return lambda c, fr: c.g[slot]
        return lambda c, fr: fr[slot]

    def e_Index(self, e):
        arr = self._array(e.sym)
        idx = self.expr(e.index)
        size = e.sym.array_size

        def f(c, fr):
            i = idx(c, fr)
            if i < 0 or i >= size:
                raise _Halt(TRAP)
            return arr(c, fr)[i]
        return f

    def e_Cast(self, e):
        inner = self.expr(e.operand)
        conv = _converter(e.operand.type, e.type)
        if conv is None:
            return inner
        return lambda c, fr: conv(inner(c, fr))

    def e_Unary(self, e):
        a = self.expr(e.operand)
        t = e.type
        if e.op == "!":
            return lambda c, fr: 0 if a(c, fr) else 1
        wrap = _converter(None, t)
        if e.op == "-":
            return lambda c, fr: wrap(-a(c, fr))
        if e.op == "~":
            return lambda c, fr: wrap(~a(c, fr))
        raise ValueError(e.op)

    def e_Binary(self, e):
        l, r = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op in ("<<", ">>"):
            t, ct = e.type, e.right.type
            return lambda c, fr: shift(op, l(c, fr), t, r(c, fr), ct)
        if op == "==":
            return lambda c, fr: 1 if l(c, fr) == r(c, fr) else 0
        if op == "!=":
            return lambda c, fr: 1 if l(c, fr) != r(c, fr) else 0
        if op == "<":
            return lambda c, fr: 1 if l(c, fr) < r(c, fr) else 0
        if op == "<=":
            return lambda c, fr: 1 if l(c, fr) <= r(c, fr) else 0
        if op == ">":
            return lambda c, fr: 1 if l(c, fr) > r(c, fr) else 0
        if op == ">=":
            return lambda c, fr: 1 if l(c, fr) >= r(c, fr) else 0
        t = e.type
        mask = t.mask
        if t.signed:
            half = 1 << (t.width - 1)
            if op == "+":
                return lambda c, fr: ((l(c, fr) + r(c, fr) + half) & mask) - half
            if op == "-":
                return lambda c, fr: ((l(c, fr) - r(c, fr) + half) & mask) - half
            if op == "*":
                return lambda c, fr: ((l(c, fr) * r(c, fr) + half) & mask) - half
            if op == "/":
                return lambda c, fr: ((c_div(l(c, fr), r(c, fr)) + half) & mask) - half
            if op == "%":
                return lambda c, fr: c_rem(l(c, fr), r(c, fr))
        else:
            if op == "+":
                return lambda c, fr: (l(c, fr) + r(c, fr)) & mask
            if op == "-":
                return lambda c, fr: (l(c, fr) - r(c, fr)) & mask
            if op == "*":
                return lambda c, fr: (l(c, fr) * r(c, fr)) & mask
            if op == "/":
                return lambda c, fr: c_div(l(c, fr), r(c, fr))
            if op == "%":
                return lambda c, fr: c_rem(l(c, fr), r(c, fr))
        # bitwise ops on normalised values stay normalised
        if op == "&":
            return lambda c, fr: l(c, fr) & r(c, fr)
        if op == "|":
            return lambda c, fr: l(c, fr) | r(c, fr)
        if op == "^":
            return lambda c, fr: l(c, fr) ^ r(c, fr)
        raise ValueError(op)

    def e_Nondet(self, e):
        t, line = e.type, e.loc.line
        return lambda c, fr: c.read(t, line)

    def e_CallExpr(self, e):
        name = e.func
        args = [self.expr(a) for a in e.args]
        fn = self.ast.function(name)
        slots = [p.slot for p in fn.params]
        size = fn.frame_size
        funcs = self.funcs

        def f(c, fr):
            new = [0] * size
            for s, a in zip(slots, args):
                new[s] = a(c, fr)
            body = funcs[name]
            if body(c, new) == _RET:
                return c.ret
            return 0
        return f

    # parsed-form expressions (the lowered form has none of these)

    def e_Logical(self, e):
        l, r = self.expr(e.left), self.expr(e.right)
        origin = (e.nid, "lhs")
        rorigin = (e.nid, "rhs")
        lt, le = self.goal(origin, "then"), self.goal(origin, "else")
        rt, re_ = self.goal(rorigin, "then"), self.goal(rorigin, "else")
        line = e.loc.line
        is_and = e.op == "&&"

        def rhs(c, fr):
            if r(c, fr):
                c.hit(rt)
                if c.record:
                    c.decisions.append((rorigin, "then", line))
                return 1
            c.hit(re_)
            if c.record:
                c.decisions.append((rorigin, "else", line))
            return 0

        def f(c, fr):
            if l(c, fr):
                c.hit(lt)
                if c.record:
                    c.decisions.append((origin, "then", line))
                return rhs(c, fr) if is_and else 1
            c.hit(le)
            if c.record:
                c.decisions.append((origin, "else", line))
            return 0 if is_and else rhs(c, fr)
        return f

    def e_Conditional(self, e):
        cond, a, b = self.expr(e.cond), self.expr(e.then), self.expr(e.else_)
        origin = (e.nid, "cond")
        gt, ge = self.goal(origin, "then"), self.goal(origin, "else")
        line = e.loc.line

        def f(c, fr):
            if cond(c, fr):
                c.hit(gt)
                if c.record:
                    c.decisions.append((origin, "then", line))
                return a(c, fr)
            c.hit(ge)
            if c.record:
                c.decisions.append((origin, "else", line))
            return b(c, fr)
        return f

    def e__Hole(self, e):
        k = e.k
        return lambda c, fr: c.hole[k]

    def _store(self, target):
        """(prepare, store): prepare evaluates the index, store writes a value."""
        conv = _converter(None, target.type)
        if isinstance(target, A.VarRef):
            slot = target.sym.slot
            if target.sym.is_global:
                def store(c, fr, key, v):
                    c.g[slot] = v
            else:
                def store(c, fr, key, v):
                    fr[slot] = v
            return (lambda c, fr: None), store, conv
        arr = self._array(target.sym)
        idx = self.expr(target.index)
        size = target.sym.array_size

        def store(c, fr, key, v):
            if key < 0 or key >= size:
                raise _Halt(TRAP)
            arr(c, fr)[key] = v
        return idx, store, conv

    def _load(self, target):
        if isinstance(target, A.VarRef):
            return self.expr(target)
        arr = self._array(target.sym)
        size = target.sym.array_size

        def load(c, fr, key):
            if key < 0 or key >= size:
                raise _Halt(TRAP)
            return arr(c, fr)[key]
        return load

    def e_AssignExpr(self, e):
        prep, store, conv = self._store(e.target)
        value = self.expr(e.value)
        if e.op == "=":
            def f(c, fr):
                key = prep(c, fr)
                v = value(c, fr)
                if conv is not None:
                    v = conv(v)
                store(c, fr, key, v)
                return v
            return f
        load = self._load(e.target)
        is_var = isinstance(e.target, A.VarRef)
        old = _Hole(0, e.target.type)
        rhs = _Hole(1, e.value.type)
        combine = self.expr(B.compound_value(e.op, old, rhs))

        def f(c, fr):
            key = prep(c, fr)
            v = value(c, fr)
            o = load(c, fr) if is_var else load(c, fr, key)
            c.hole = (o, v)
            nv = combine(c, fr)
            store(c, fr, key, nv)
            return nv
        return f

    def e_IncDec(self, e):
        prep, store, conv = self._store(e.target)
        load = self._load(e.target)
        is_var = isinstance(e.target, A.VarRef)
        combine = self.expr(B.incdec_value(e.op, _Hole(0, e.target.type)))
        prefix = e.prefix

        def f(c, fr):
            key = prep(c, fr)
            o = load(c, fr) if is_var else load(c, fr, key)
            c.hole = (o,)
            nv = combine(c, fr)
            store(c, fr, key, nv)
            return nv if prefix else o
        return f

    # ------------------------------------------------------------ statements

    def block(self, stmts: Sequence) -> Callable:
        fs = [self.stmt(s) for s in stmts]
        n = len(fs)
        if n == 0:
            return lambda c, fr: None
        if n == 1:
            only = fs[0]

            def run1(c, fr):
                c.steps += 1
                if c.steps > c.limit:
                    _step_overflow(c)
                return only(c, fr)
            return run1

        def run(c, fr):
            c.steps += n
            if c.steps > c.limit:
                _step_overflow(c)
            for s in fs:
                sig = s(c, fr)
                if sig is not None:
                    return sig
            return None
        return run

    def body(self, s) -> Callable:
        if isinstance(s, A.Block):
            return self.block(s.stmts)
        return self.block([s])

    def stmt(self, s) -> Callable:
        return getattr(self, "s_" + type(s).__name__)(s)

    def s_Block(self, s):
        return self.block(s.stmts)

    def s_Decl(self, s):
        slot = s.sym.slot
        if s.sym.array_size is not None:
            size = s.sym.array_size
            init = list(s.array_init or ())
            init += [0] * (size - len(init))

            def f(c, fr):
                fr[slot] = list(init)
            return f
        if s.init is None:
            def f(c, fr):
                fr[slot] = 0
            return f
        value = self.expr(s.init)
        conv = _converter(s.init.type, s.sym.type)

        def f(c, fr):
            v = value(c, fr)
            fr[slot] = v if conv is None else conv(v)
        return f

    def s_ExprStmt(self, s):
        e = self.expr(s.expr)

        def f(c, fr):
            e(c, fr)
        return f

    def s_Assign(self, s):
        prep, store, _ = self._store(s.target)
        value = self.expr(s.value)
        conv = _converter(s.value.type, s.target.type)
        if isinstance(s.target, A.VarRef):
            slot = s.target.sym.slot
            if s.target.sym.is_global:
                if conv is None:
                    def f(c, fr):
                        c.g[slot] = value(c, fr)
                else:
                    def f(c, fr):
                        c.g[slot] = conv(value(c, fr))
            elif conv is None:
                def f(c, fr):
                    fr[slot] = value(c, fr)
            else:
                def f(c, fr):
                    fr[slot] = conv(value(c, fr))
            return f

        def f(c, fr):
            key = prep(c, fr)
            v = value(c, fr)
            store(c, fr, key, v if conv is None else conv(v))
        return f

    def _branch(self, origin, line):
        gt, ge = self.goal(origin, "then"), self.goal(origin, "else")

        def taken(c, yes):
            if yes:
                c.hit(gt)
                if c.record:
                    c.decisions.append((origin, "then", line))
            else:
                c.hit(ge)
                if c.record:
                    c.decisions.append((origin, "else", line))
        return taken

    def s_If(self, s):
        cond = self.expr(s.cond)
        then = self.body(s.then)
        else_ = self.body(s.else_) if s.else_ is not None else None
        taken = self._branch(s.origin, s.loc.line)

        def f(c, fr):
            if cond(c, fr):
                taken(c, True)
                return then(c, fr)
            taken(c, False)
            if else_ is not None:
                return else_(c, fr)
            return None
        return f

    def _loop(self, origin, line, prelude, cond, body, step, do_while):
        ge, gx = self.goal(origin, "enter"), self.goal(origin, "exit")

        def f(c, fr):
            first = do_while
            while True:
                c.steps += 1
                if c.steps > c.limit:
                    _step_overflow(c)
                if first:
                    first = False
                else:
                    if prelude is not None:
                        prelude(c, fr)
                    if cond(c, fr):
                        c.hit(ge)
                        if c.record:
                            c.decisions.append((origin, "enter", line))
                    else:
                        c.hit(gx)
                        if c.record:
                            c.decisions.append((origin, "exit", line))
                        return None
                sig = body(c, fr)
                if sig == _BRK:
                    return None
                if sig == _RET:
                    return _RET
                if step is not None:
                    step(c, fr)
        return f

    def s_Loop(self, s):
        prelude = self.block(s.prelude) if s.prelude else None
        step = self.block(s.step) if s.step else None
        return self._loop(s.origin, s.loc.line, prelude, self.expr(s.cond),
                          self.body(s.body), step, s.do_while)

    def s_While(self, s):
        return self._loop(s.origin, s.loc.line, None, self.expr(s.cond), self.body(s.body),
                          None, False)

    def s_DoWhile(self, s):
        return self._loop(s.origin, s.loc.line, None, self.expr(s.cond), self.body(s.body),
                          None, True)

    def s_For(self, s):
        init = self.stmt(s.init) if s.init is not None else None
        cond = self.expr(s.cond) if s.cond is not None else (lambda c, fr: 1)
        step = None
        if s.step is not None:
            se = self.expr(s.step)

            def run_step(c, fr):
                se(c, fr)
            step = run_step
        loop = self._loop(s.origin, s.loc.line, None, cond, self.body(s.body), step, False)
        if init is None:
            return loop

        def f(c, fr):
            init(c, fr)
            return loop(c, fr)
        return f

    def s_Switch(self, s):
        tag = self.expr(s.tag)
        origin, line = s.origin, s.loc.line
        sections = [self.block(sec.body) for sec in s.sections]
        table: dict = {}
        default_idx = None
        for i, sec in enumerate(s.sections):
            for label in sec.labels:
                if label is None:
                    default_idx = i
                else:
                    table[label] = (i, self.goal(origin, ("case", label)), ("case", label))
        dflt = (default_idx, self.goal(origin, "default"), "default")

        def f(c, fr):
            v = tag(c, fr)
            idx, gid, arm = table.get(v, dflt)
            c.hit(gid)
            if c.record:
                c.decisions.append((origin, arm, line))
            if idx is None:
                return None
            for sec in sections[idx:]:
                sig = sec(c, fr)
                if sig == _BRK:
                    return None
                if sig is not None:
                    return sig
            return None
        return f

    def s_Break(self, s):
        return lambda c, fr: _BRK

    def s_Continue(self, s):
        return lambda c, fr: _CONT

    def s_Return(self, s):
        if s.value is None:
            def f(c, fr):
                c.ret = 0
                return _RET
            return f
        value = self.expr(s.value)

        def f(c, fr):
            c.ret = value(c, fr)
            return _RET
        return f

    def s_ErrorCall(self, s):
        gid = self.goal(s.origin, "error")

        def f(c, fr):
            c.hit(gid)
            raise _Halt(ERROR)
        return f

    def s_Assume(self, s):
        cond = self.expr(s.cond)

        def f(c, fr):
            if not cond(c, fr):
                raise _Halt(EXITED, 0)
        return f

    def s_Abort(self, s):
        def f(c, fr):
            raise _Halt(ABORTED)
        return f

    def s_Exit(self, s):
        code = self.expr(s.code)

        def f(c, fr):
            raise _Halt(EXITED, code(c, fr))
        return f


@dataclass(frozen=True)
class _Hole:
    k: int
    type: TypeDesc
    loc: A.Loc = A.NOLOC


@dataclass
class CompiledProgram:
    funcs: dict
    entry: Callable
    entry_frame: int
    globals_init: list


def _global_value(d: A.Decl):
    if d.sym.array_size is not None:
        init = list(d.array_init or ())
        return init + [0] * (d.sym.array_size - len(init))
    if d.init is None:
        return 0
    return d.sym.type.convert(B.const_eval(d.init))


def compile_program(prog: InstrumentedProgram) -> CompiledProgram:
    cached = prog._cache.get("compiled")
    if cached is not None:
        return cached
    comp = _Compiler(prog.ast, prog.goal_of)
    for fn in prog.ast.functions:
        comp.funcs[fn.name] = comp.block(fn.body.stmts)
    entry = prog.ast.function(prog.ast.entry)
    globals_init = [0] * prog.ast.global_count
    for d in prog.ast.globals:
        globals_init[d.sym.slot] = _global_value(d)
    cp = CompiledProgram(comp.funcs, comp.funcs[entry.name], entry.frame_size, globals_init)
    prog._cache["compiled"] = cp
    return cp


def execute(prog: InstrumentedProgram, tape: Sequence = (), step_limit: int = DEFAULT_STEP_LIMIT,
            *, record_decisions: bool = True, on_exhaust: Optional[Callable] = None) -> Trace:
    """Run ``prog`` on ``tape``.

    Tape items are ``(TypeDesc, value)`` pairs or bare integers; each is
    truncated modularly to the type the nondet call asks for. ``on_exhaust``
    may supply extra items (return None to stop) when the tape runs out.
    """
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    cp = compile_program(prog)
    c = _Ctx()
    c.g = [list(v) if isinstance(v, list) else v for v in cp.globals_init]
    c.tape = tape
    c.pos = 0
    c.seen = set()
    c.hits = []
    c.decisions = []
    c.record = record_decisions
    c.steps = 0
    c.limit = step_limit
    c.ret = 0
    c.hole = ()
    c.on_exhaust = on_exhaust
    c.types, c.values, c.lines, c.marks = [], [], [], []
    c.requested = None
    code = None
    try:
        frame = [0] * cp.entry_frame
        status = EXITED
        if cp.entry(c, frame) == _RET:
            code = c.ret
        else:
            code = 0
    except _Halt as h:
        status, code = h.status, h.code
    except DivisionByZero:
        status = TRAP
    except RecursionError:
        status = STEP_LIMIT
    return Trace(status=status, exit_code=code if status == EXITED else None,
                 goals_hit=c.hits, error_reached=status == ERROR, inputs_consumed=c.pos,
                 input_types=c.types, input_values=c.values, input_lines=c.lines,
                 decisions=c.decisions, requested_type=c.requested, steps=c.steps,
                 input_marks=c.marks)


def format_trace(trace: Trace, prog: Optional[InstrumentedProgram] = None) -> str:
    lines = [f"status: {trace.describe_status()}",
             f"error_reached: {str(trace.error_reached).lower()}",
             f"inputs_consumed: {trace.inputs_consumed}"]
    for i, (t, v) in enumerate(zip(trace.input_types, trace.input_values)):
        lines.append(f"  input[{i}] {t} = {v}")
    if trace.requested_type is not None:
        lines.append(f"  input[{trace.inputs_consumed}] {trace.requested_type} = <missing>")
    lines.append("goals_hit: " + " ".join(f"GOAL-{g}" for g in trace.goals_hit))
    lines.append(f"decisions: {len(trace.decisions)}")
    for origin, arm, line in trace.decisions[:200]:
        arm_s = arm if isinstance(arm, str) else f"case {arm[1]}"
        lines.append(f"  line {line}: {arm_s}")
    if len(trace.decisions) > 200:
        lines.append("  ...")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------- exhaustive oracle


class BudgetExceeded(Exception):
    pass


def count_reachable_goals_exhaustive(prog: InstrumentedProgram, input_bit_budget: int = 16,
                                     step_limit: int = 10 ** 6) -> set:
    """Exact set of goals reachable by some tape, by enumerating every tape.

    Tapes are grown position by position with each position ranging over
    the full domain of the type the program requests there, which is the
    same as enumerating all tapes of the path's total width.
    """
    if input_bit_budget > 16:
        raise ValueError("input_bit_budget must be at most 16")
    reached: set = set()
    stack: list = [((), 0)]
    while stack:
        prefix, bits = stack.pop()
        tr = execute(prog, prefix, step_limit, record_decisions=False)
        reached.update(tr.goals_hit)
        if tr.status != TAPE_EXHAUSTED:
            continue
        t = tr.requested_type
        nbits = bits + t.width
        if nbits > input_bit_budget:
            raise BudgetExceeded(f"a path needs more than {input_bit_budget} input bits")
        for v in range(t.max, t.min - 1, -1):
            stack.append((prefix + ((t, v),), nbits))
    return reached
