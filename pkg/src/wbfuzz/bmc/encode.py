"""Encoding of a loop-free program as a bit-vector formula.

Execution is symbolic with guard-based merging: each live path state holds
a guard and an environment of terms; control-flow joins merge states into
``ite`` selections. Breaks, continues and returns park their states in
collectors that are merged where control resumes. Traps (zero divisors,
out-of-bounds indices) and ``assume`` narrow the guard of the path from
that point on, since the concrete run stops there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast as A
from ..frontend.inttypes import INT, TypeDesc
from ..sat.terms import Term, TermBuilder
from .unroll import Inlined, LoopFreeProgram, Unwound


@dataclass
class NondetSymbol:
    index: int
    type: TypeDesc
    guard: Term  # path condition under which the read happens
    line: int
    sliced: bool = False


@dataclass
class Instance:
    goal: int
    guard: Term
    horizon: int  # nondet symbols created before this point


@dataclass
class SsaFormula:
    builder: TermBuilder
    defs: list  # (name, term), in creation order
    nondet: list  # NondetSymbol, in consumption order
    instances: dict  # goal id -> [Instance]
    targets: dict  # goal id -> term
    cut_guards: list  # guards of paths cut by the unwinding assumption
    k: int
    unsat_goals: set = field(default_factory=set)  # folded to false
    folded: bool = False
    sliced_for: Optional[int] = None

    def target(self, goal: int) -> Term:
        return self.targets.get(goal, self.builder.false)


class _State:
    __slots__ = ("guard", "env")

    def __init__(self, guard: Term, env: dict):
        self.guard = guard
        self.env = env

    def fork(self, guard: Term) -> "_State":
        return _State(guard, dict(self.env))


class _Frame:
    def __init__(self, fid: int):
        self.fid = fid
        self.returns: list = []


class _LoopCtx:
    def __init__(self):
        self.breaks: list = []
        self.continues: list = []


@dataclass(frozen=True)
class _Value:
    """An already-encoded term posing as an expression."""
    term: Term
    type: TypeDesc
    loc: A.Loc = A.NOLOC


class Encoder:
    def __init__(self, lf: LoopFreeProgram, simplify: bool = True):
        self.lf = lf
        self.goal_of = lf.prog.goal_of
        self.tb = TermBuilder(simplify)
        self.defs: list = []
        self.nondet: list = []
        self.instances: dict = {}
        self.cut_guards: list = []
        self.frames: list = []
        self.breakable: list = []  # loop or switch contexts
        self.loops: list = []
        self.next_frame = 0
        self.versions: dict = {}

    # ------------------------------------------------------------- helpers

    def zero(self, t: TypeDesc) -> Term:
        return self.tb.const(0, t.width)

    def key(self, sym: A.Symbol):
        return ("g", sym.slot) if sym.is_global else (self.frames[-1].fid, sym.slot)

    def define(self, key, value, name: str):
        """Record an SSA definition; arrays define each element."""
        n = self.versions.get(key, 0)
        self.versions[key] = n + 1
        if isinstance(value, tuple):
            for i, v in enumerate(value):
                self.defs.append((f"{name}[{i}]#{n}", v))
        else:
            self.defs.append((f"{name}#{n}", value))

    def convert(self, term: Term, src: Optional[TypeDesc], dst: TypeDesc) -> Term:
        tb = self.tb
        if src == dst:
            return term
        if dst.is_bool:
            return tb.nonzero(term)
        if term.width == dst.width:
            return term
        if term.width > dst.width:
            return tb.op("trunc", term, width=dst.width)
        signed = src is not None and src.signed
        return tb.op("sext" if signed else "zext", term, width=dst.width)

    def add_goal(self, origin, arm, guard: Term) -> None:
        gid = self.goal_of.get((origin, arm))
        if gid is None:
            return
        self.instances.setdefault(gid, []).append(Instance(gid, guard, len(self.nondet)))

    # --------------------------------------------------------- expressions

    def expr(self, e, st: _State, traps: list) -> Term:
        tb = self.tb
        if isinstance(e, _Value):
            return e.term
        if isinstance(e, A.IntLit):
            return tb.const(e.value, e.type.width)
        if isinstance(e, A.VarRef):
            k = self.key(e.sym)
            v = st.env.get(k)
            return v if v is not None else self.zero(e.type)
        if isinstance(e, A.Index):
            idx = self.expr(e.index, st, traps)
            arr = self.array(e.sym, st)
            return self.select(arr, idx, e.index.type, traps)
        if isinstance(e, A.Cast):
            return self.convert(self.expr(e.operand, st, traps), e.operand.type, e.type)
        if isinstance(e, A.Unary):
            a = self.expr(e.operand, st, traps)
            if e.op == "!":
                return tb.op("zext", tb.op("eq", a, tb.const(0, a.width)), width=INT.width)
            return tb.op("neg" if e.op == "-" else "not", a)
        if isinstance(e, A.Binary):
            return self.binary(e, st, traps)
        if isinstance(e, A.Nondet):
            sym = NondetSymbol(len(self.nondet), e.type, st.guard, e.loc.line)
            self.nondet.append(sym)
            return tb.sym(sym.index, e.type.width)
        raise TypeError(f"unexpected {type(e).__name__} in lowered expression")

    def binary(self, e: A.Binary, st: _State, traps: list) -> Term:
        tb = self.tb
        a = self.expr(e.left, st, traps)
        b = self.expr(e.right, st, traps)
        op = e.op
        if op == "<<":
            return tb.op("shl", a, b)
        if op == ">>":
            return tb.op("ashr" if e.type.signed else "lshr", a, b)
        signed = e.left.type.signed
        if op in ("==", "!="):
            r = tb.op("eq", a, b)
            if op == "!=":
                r = tb.bnot(r)
        elif op in ("<", ">", "<=", ">="):
            lt, le = ("slt", "sle") if signed else ("ult", "ule")
            if op == "<":
                r = tb.op(lt, a, b)
            elif op == ">":
                r = tb.op(lt, b, a)
            elif op == "<=":
                r = tb.op(le, a, b)
            else:
                r = tb.op(le, b, a)
        else:
            if op in ("/", "%"):
                traps.append(tb.nonzero(b))
                name = ("sdiv" if signed else "udiv") if op == "/" else \
                    ("srem" if signed else "urem")
                return tb.op(name, a, b)
            name = {"+": "add", "-": "sub", "*": "mul", "&": "and", "|": "or", "^": "xor"}[op]
            return tb.op(name, a, b)
        return tb.op("zext", r, width=INT.width)

    def array(self, sym: A.Symbol, st: _State) -> tuple:
        v = st.env.get(self.key(sym))
        if v is None:
            z = self.zero(sym.type)
            v = (z,) * sym.array_size
        return v

    def wide_index(self, idx: Term, idx_type: TypeDesc, n: int) -> Term:
        """Widen ``idx`` so that every position below ``n`` is representable."""
        if (1 << (idx.width - 1)) > n:
            return idx
        return self.tb.op("sext" if idx_type.signed else "zext", idx, width=64)

    def select(self, arr: tuple, idx: Term, idx_type: TypeDesc, traps: list) -> Term:
        tb = self.tb
        n = len(arr)
        if idx.op == "const":
            i = idx_type.wrap(idx.val)
            if 0 <= i < n:
                return arr[i]
            traps.append(tb.false)
            return arr[0]
        idx = self.wide_index(idx, idx_type, n)
        traps.append(self.in_bounds(idx, idx_type, n))
        result = arr[n - 1]
        for j in range(n - 2, -1, -1):
            result = tb.ite(tb.op("eq", idx, tb.const(j, idx.width)), arr[j], result)
        return result

    def in_bounds(self, idx: Term, idx_type: TypeDesc, n: int) -> Term:
        # a negative signed index reads as a huge unsigned value
        return self.tb.op("ult", idx, self.tb.const(n, idx.width))

    def store(self, arr: tuple, idx: Term, idx_type: TypeDesc, value: Term, traps: list
              ) -> tuple:
        tb = self.tb
        n = len(arr)
        if idx.op == "const":
            i = idx_type.wrap(idx.val)
            if 0 <= i < n:
                return arr[:i] + (value,) + arr[i + 1:]
            traps.append(tb.false)
            return arr
        idx = self.wide_index(idx, idx_type, n)
        traps.append(self.in_bounds(idx, idx_type, n))
        return tuple(tb.ite(tb.op("eq", idx, tb.const(j, idx.width)), value, old)
                     for j, old in enumerate(arr))

    # ----------------------------------------------------------- statements

    def narrow(self, st: _State, conds: list) -> Optional[_State]:
        g = st.guard
        for c in conds:
            g = self.tb.band(g, c)
        if g is self.tb.false:
            return None
        st.guard = g
        return st

    def run(self, stmts, st: Optional[_State]) -> Optional[_State]:
        for s in stmts:
            if st is None:
                return None
            st = self.stmt(s, st)
        return st

    def merge(self, states: list) -> Optional[_State]:
        states = [s for s in states if s is not None and s.guard is not self.tb.false]
        if not states:
            return None
        if len(states) == 1:
            return states[0]
        tb = self.tb
        guard = states[0].guard
        for s in states[1:]:
            guard = tb.bor(guard, s.guard)
        keys: dict = {}
        for s in states:
            for k in s.env:
                keys.setdefault(k, None)
        env = {}
        for k in keys:
            vals = [s.env.get(k) for s in states]
            first = vals[0]
            if all(v is first for v in vals):
                env[k] = first
                continue
            proto = next(v for v in vals if v is not None)
            if isinstance(proto, tuple):
                vals = [v if v is not None else tuple(tb.const(0, x.width) for x in proto)
                        for v in vals]
                acc = vals[-1]
                for s, v in zip(reversed(states[:-1]), reversed(vals[:-1])):
                    acc = tuple(tb.ite(s.guard, x, y) for x, y in zip(v, acc))
            else:
                vals = [v if v is not None else tb.const(0, proto.width) for v in vals]
                acc = vals[-1]
                for s, v in zip(reversed(states[:-1]), reversed(vals[:-1])):
                    acc = tb.ite(s.guard, v, acc)
            env[k] = acc
            self.define(k, acc, f"phi{k}")
        return _State(guard, env)

    def stmt(self, s, st: _State) -> Optional[_State]:
        tb = self.tb
        if isinstance(s, A.Block):
            return self.run(s.stmts, st)
        if isinstance(s, A.Decl):
            k = self.key(s.sym)
            if s.sym.array_size is not None:
                init = list(s.array_init or ())
                init += [0] * (s.sym.array_size - len(init))
                st.env[k] = tuple(tb.const(v, s.sym.type.width) for v in init)
            else:
                st.env[k] = self.zero(s.sym.type)
            return st
        if isinstance(s, A.Assign):
            traps: list = []
            if isinstance(s.target, A.Index):
                idx = self.expr(s.target.index, st, traps)
                v = self.convert(self.expr(s.value, st, traps), s.value.type, s.target.type)
                arr = self.store(self.array(s.target.sym, st), idx, s.target.index.type, v, traps)
                k = self.key(s.target.sym)
                st.env[k] = arr
                self.define(k, arr, s.target.sym.name)
            else:
                v = self.convert(self.expr(s.value, st, traps), s.value.type, s.target.type)
                k = self.key(s.target.sym)
                st.env[k] = v
                self.define(k, v, s.target.sym.name)
            return self.narrow(st, traps)
        if isinstance(s, A.ExprStmt):
            traps = []
            self.expr(s.expr, st, traps)
            return self.narrow(st, traps)
        if isinstance(s, A.If):
            traps = []
            c = tb.nonzero(self.expr(s.cond, st, traps))
            st = self.narrow(st, traps)
            if st is None:
                return None
            g_then = tb.band(st.guard, c)
            g_else = tb.band(st.guard, tb.bnot(c))
            self.add_goal(s.origin, "then", g_then)
            self.add_goal(s.origin, "else", g_else)
            t_state = self.stmt(s.then, st.fork(g_then)) if g_then is not tb.false else None
            if g_else is tb.false:
                e_state = None
            elif s.else_ is not None:
                e_state = self.stmt(s.else_, st.fork(g_else))
            else:
                e_state = st.fork(g_else)
            return self.merge([t_state, e_state])
        if isinstance(s, Unwound):
            return self.unwound(s, st)
        if isinstance(s, A.Switch):
            return self.switch(s, st)
        if isinstance(s, Inlined):
            return self.inlined(s, st)
        if isinstance(s, A.Break):
            self.breakable[-1].breaks.append(st)
            return None
        if isinstance(s, A.Continue):
            self.loops[-1].continues.append(st)
            return None
        if isinstance(s, A.Return):
            frame = self.frames[-1]
            traps = []
            if s.value is not None:
                v = self.expr(s.value, st, traps)
                st.env[("ret", frame.fid)] = v
            st = self.narrow(st, traps)
            if st is not None:
                frame.returns.append(st)
            return None
        if isinstance(s, A.ErrorCall):
            self.add_goal(s.origin, "error", st.guard)
            return None
        if isinstance(s, A.Assume):
            traps = []
            c = tb.nonzero(self.expr(s.cond, st, traps))
            return self.narrow(st, traps + [c])
        if isinstance(s, A.Abort):
            return None
        if isinstance(s, A.Exit):
            traps = []
            self.expr(s.code, st, traps)
            return None
        raise TypeError(f"cannot encode {type(s).__name__}")

    def unwound(self, s: Unwound, st: _State) -> Optional[_State]:
        tb = self.tb
        ctx = _LoopCtx()
        self.breakable.append(ctx)
        self.loops.append(ctx)
        exits: list = []

        def body_and_step(state):
            state = self.stmt(s.body, state)
            state = self.merge([state] + ctx.continues)
            ctx.continues.clear()
            if state is not None:
                state = self.stmt(s.step, state)
            return state

        if s.do_while:
            st = body_and_step(st)
        checks = s.k if s.do_while else s.k + 1
        for i in range(checks):
            if st is None:
                break
            st = self.stmt(s.prelude, st)
            if st is None:
                break
            traps: list = []
            c = tb.nonzero(self.expr(s.cond, st, traps))
            st = self.narrow(st, traps)
            if st is None:
                break
            g_exit = tb.band(st.guard, tb.bnot(c))
            g_enter = tb.band(st.guard, c)
            self.add_goal(s.origin, "exit", g_exit)
            if g_exit is not tb.false:
                exits.append(st.fork(g_exit))
            if i == checks - 1:
                if g_enter is not tb.false:
                    self.cut_guards.append(g_enter)
                st = None
                break
            self.add_goal(s.origin, "enter", g_enter)
            if g_enter is tb.false:
                st = None
                break
            st.guard = g_enter
            st = body_and_step(st)
        self.loops.pop()
        self.breakable.pop()
        return self.merge(exits + ctx.breaks)

    def switch(self, s: A.Switch, st: _State) -> Optional[_State]:
        tb = self.tb
        traps: list = []
        tag = self.expr(s.tag, st, traps)
        st = self.narrow(st, traps)
        if st is None:
            return None
        conds = {}
        for sec in s.sections:
            for label in sec.labels:
                if label is not None:
                    conds[label] = tb.op("eq", tag, tb.const(label, tag.width))
        none_match = tb.bnot(tb.any_of(conds.values()))
        ctx = _LoopCtx()
        self.breakable.append(ctx)
        fall: Optional[_State] = None
        for sec in s.sections:
            entry_cond = tb.false
            for label in sec.labels:
                c = none_match if label is None else conds[label]
                g = tb.band(st.guard, c)
                self.add_goal(s.origin, "default" if label is None else ("case", label), g)
                entry_cond = tb.bor(entry_cond, c)
            g_entry = tb.band(st.guard, entry_cond)
            entry = st.fork(g_entry) if g_entry is not tb.false else None
            cur = self.merge([fall, entry])
            fall = self.run(sec.body, cur) if cur is not None else None
        self.breakable.pop()
        out = [fall] + ctx.breaks
        if not s.has_default:
            g = tb.band(st.guard, none_match)
            self.add_goal(s.origin, "default", g)
            if g is not tb.false:
                out.append(st.fork(g))
        return self.merge(out)

    def inlined(self, s: Inlined, st: _State) -> Optional[_State]:
        traps: list = []
        args = [self.expr(a, st, traps) for a in s.args]
        st = self.narrow(st, traps)
        if st is None:
            return None
        self.next_frame += 1
        frame = _Frame(self.next_frame)
        for p, v in zip(s.params, args):
            st.env[(frame.fid, p.slot)] = v
        self.frames.append(frame)
        saved_break, saved_loops = self.breakable, self.loops
        self.breakable, self.loops = [], []
        end = self.stmt(s.body, st)
        self.breakable, self.loops = saved_break, saved_loops
        self.frames.pop()
        st = self.merge([end] + frame.returns)
        if st is None:
            return None
        ret = st.env.pop(("ret", frame.fid), None)
        for k in [k for k in st.env if k[0] == frame.fid]:
            del st.env[k]
        if s.target is not None:
            if ret is None:
                ret = self.zero(s.ret_type)
            assign = A.Assign(s.target, _Value(ret, s.ret_type), s.loc)
            return self.stmt(assign, st)
        return st


def encode_ssa(lf: LoopFreeProgram, simplify: bool = True) -> SsaFormula:
    enc = Encoder(lf, simplify)
    tb = enc.tb
    env = {}
    for d in lf.globals:
        k = ("g", d.sym.slot)
        if d.sym.array_size is not None:
            init = list(d.array_init or ())
            init += [0] * (d.sym.array_size - len(init))
            env[k] = tuple(tb.const(v, d.sym.type.width) for v in init)
        else:
            v = d.init.value if isinstance(d.init, A.IntLit) else 0
            env[k] = tb.const(v, d.sym.type.width)
    enc.frames.append(_Frame(0))
    st = _State(tb.true, env)
    enc.stmt(lf.body, st)
    targets = {}
    for gid, insts in enc.instances.items():
        targets[gid] = tb.any_of(i.guard for i in insts)
    for g in lf.prog.goals:
        targets.setdefault(g.id, tb.false)
    unsat = {g for g, t in targets.items() if t is tb.false} if simplify else set()
    return SsaFormula(tb, enc.defs, enc.nondet, enc.instances, targets, enc.cut_guards, lf.k,
                      unsat, folded=simplify)
