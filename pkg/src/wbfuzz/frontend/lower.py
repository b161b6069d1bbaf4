"""Normalisation of the parsed tree into the form every engine consumes.

After lowering, expressions are side-effect free ("pure"); assignments,
calls and nondet reads are statements; ``&&``, ``||`` and ``?:`` become
``if`` statements over fresh temporaries; every loop is a :class:`Loop`.
Operands keep C's left-to-right evaluation order: an already evaluated
operand is spilled into a temporary whenever a later operand has effects.
"""
from __future__ import annotations

from . import ast as A
from . import build as B
from .inttypes import INT


def _has_trap(e) -> bool:
    return any(isinstance(n, A.Index) or (isinstance(n, A.Binary) and n.op in ("/", "%"))
               for n in A.walk_expr(e))


class _FunctionLowerer:
    def __init__(self, fn: A.FunctionDef):
        self.fn = fn
        self.slots = fn.frame_size
        self.ntemps = 0

    def temp(self, t) -> A.Symbol:
        sym = A.Symbol(f"__t{self.ntemps}", t, False, self.slots)
        self.ntemps += 1
        self.slots += 1
        return sym

    def run(self) -> A.FunctionDef:
        body = self.block(self.fn.body)
        return A.FunctionDef(self.fn.name, self.fn.ret_type, self.fn.params, body,
                             self.slots, self.fn.loc)

    # ------------------------------------------------------------ statements

    def block(self, s) -> A.Block:
        if s is None:
            return None
        if isinstance(s, A.Block):
            out: list = []
            for st in s.stmts:
                out.extend(self.stmt(st))
            return A.Block(tuple(out), s.loc)
        return A.Block(tuple(self.stmt(s)), s.loc)

    def stmt(self, s) -> list:
        if isinstance(s, A.Block):
            return [self.block(s)]
        if isinstance(s, A.Decl):
            decl = A.Decl(s.sym, None, s.array_init, s.loc)
            if s.init is None:
                return [decl]
            target = A.VarRef(s.sym, s.sym.type, s.loc)
            return [decl] + self.assign_to(target, s.init, s.loc)
        if isinstance(s, A.ExprStmt):
            return self.effect(s.expr, s.loc)
        if isinstance(s, A.Assign):
            return [s]
        if isinstance(s, A.If):
            pre, c = self.expr(s.cond)
            else_ = self.block(s.else_) if s.else_ is not None else None
            return pre + [A.If(c, self.block(s.then), else_, s.origin, s.loc)]
        if isinstance(s, A.While):
            pre, c = self.expr(s.cond)
            return [A.Loop(tuple(pre), c, self.block(s.body), (), False, s.origin, s.loc)]
        if isinstance(s, A.DoWhile):
            pre, c = self.expr(s.cond)
            return [A.Loop(tuple(pre), c, self.block(s.body), (), True, s.origin, s.loc)]
        if isinstance(s, A.For):
            init = self.stmt(s.init) if s.init is not None else []
            if s.cond is None:
                pre, c = [], B.lit(1, INT, s.loc)
            else:
                pre, c = self.expr(s.cond)
            step = self.effect(s.step, s.loc) if s.step is not None else []
            loop = A.Loop(tuple(pre), c, self.block(s.body), tuple(step), False, s.origin, s.loc)
            return [A.Block(tuple(init + [loop]), s.loc)]
        if isinstance(s, A.Loop):
            return [s]
        if isinstance(s, A.Switch):
            pre, tag = self.expr(s.tag)
            sections = []
            for sec in s.sections:
                body: list = []
                for st in sec.body:
                    body.extend(self.stmt(st))
                sections.append(A.SwitchSection(sec.labels, tuple(body), sec.loc))
            return pre + [A.Switch(tag, tuple(sections), s.origin, s.loc)]
        if isinstance(s, A.Return):
            if s.value is None:
                return [s]
            pre, v = self.expr(s.value)
            return pre + [A.Return(v, s.loc)]
        if isinstance(s, A.Assume):
            pre, c = self.expr(s.cond)
            return pre + [A.Assume(c, s.loc)]
        if isinstance(s, A.Exit):
            pre, c = self.expr(s.code)
            return pre + [A.Exit(c, s.loc)]
        if isinstance(s, (A.ErrorCall, A.Abort, A.Break, A.Continue)):
            return [s]
        raise TypeError(f"cannot lower {type(s).__name__}")

    def assign_to(self, target, value, loc) -> list:
        """Statements storing ``value`` into an already-lowered ``target``."""
        if isinstance(value, A.Nondet):
            return [A.Assign(target, value, loc)]
        if isinstance(value, A.CallExpr):
            pre, args = self.seq(list(value.args))
            return pre + [A.Assign(target, A.CallExpr(value.func, tuple(args), value.type,
                                                      value.loc), loc)]
        pre, v = self.expr(value)
        return pre + [A.Assign(target, v, loc)]

    def effect(self, e, loc) -> list:
        """Lower an expression whose value is discarded."""
        if isinstance(e, A.AssignExpr):
            pre, _ = self.assign_expr(e)
            return pre
        if isinstance(e, A.IncDec):
            pre, target = self.lvalue(e.target)
            return pre + [A.Assign(target, B.incdec_value(e.op, target, e.loc), e.loc)]
        if isinstance(e, A.CallExpr):
            pre, args = self.seq(list(e.args))
            return pre + [A.ExprStmt(A.CallExpr(e.func, tuple(args), e.type, e.loc), loc)]
        pre, v = self.expr(e)
        if _has_trap(v):
            pre.append(A.ExprStmt(v, loc))
        return pre

    # ----------------------------------------------------------- expressions

    def seq(self, exprs: list) -> tuple[list, list]:
        parts = [self.expr(e) for e in exprs]
        pre: list = []
        values = []
        for i, (p, v) in enumerate(parts):
            pre.extend(p)
            later_effects = any(parts[j][0] for j in range(i + 1, len(parts)))
            if later_effects and not isinstance(v, A.IntLit):
                t = self.temp(v.type)
                pre.append(A.Assign(A.VarRef(t, t.type, v.loc), v, v.loc))
                v = A.VarRef(t, t.type, v.loc)
            values.append(v)
        return pre, values

    def lvalue(self, target) -> tuple[list, object]:
        if isinstance(target, A.VarRef):
            return [], target
        pre, idx = self.expr(target.index)
        return pre, A.Index(target.sym, idx, target.type, target.loc)

    def assign_expr(self, e: A.AssignExpr) -> tuple[list, object]:
        pre_t, target = self.lvalue(e.target)
        if e.op == "=" and isinstance(e.value, (A.Nondet, A.CallExpr)):
            # the callee may write variables the index reads
            if isinstance(e.value, A.CallExpr) and isinstance(target, A.Index):
                target, pre_t = self._spill_index(target, pre_t)
            return pre_t + self.assign_to(target, e.value, e.loc), target
        pre_v, v = self.expr(e.value)
        if pre_v and isinstance(target, A.Index):
            target, pre_t = self._spill_index(target, pre_t)
        if e.op != "=":
            v = B.compound_value(e.op, target, v, e.loc)
        return pre_t + pre_v + [A.Assign(target, v, e.loc)], target

    def _spill_index(self, target: A.Index, pre: list):
        if isinstance(target.index, A.IntLit):
            return target, pre
        t = self.temp(target.index.type)
        ref = A.VarRef(t, t.type, target.loc)
        pre = pre + [A.Assign(ref, target.index, target.loc)]
        return A.Index(target.sym, ref, target.type, target.loc), pre

    def expr(self, e) -> tuple[list, object]:
        if isinstance(e, (A.IntLit, A.VarRef)):
            return [], e
        if isinstance(e, A.Index):
            pre, i = self.expr(e.index)
            return pre, A.Index(e.sym, i, e.type, e.loc)
        if isinstance(e, A.Unary):
            pre, v = self.expr(e.operand)
            return pre, A.Unary(e.op, v, e.type, e.loc)
        if isinstance(e, A.Cast):
            pre, v = self.expr(e.operand)
            return pre, A.Cast(v, e.type, e.loc)
        if isinstance(e, A.Binary):
            pre, (l, r) = self.seq([e.left, e.right])
            return pre, A.Binary(e.op, l, r, e.type, e.loc)
        if isinstance(e, A.Logical):
            return self.logical(e)
        if isinstance(e, A.Conditional):
            t = self.temp(e.type)
            ref = A.VarRef(t, t.type, e.loc)
            pre_c, c = self.expr(e.cond)
            pre_a, a = self.expr(e.then)
            pre_b, b = self.expr(e.else_)
            stmt = A.If(c, A.Block(tuple(pre_a + [A.Assign(ref, a, e.loc)])),
                        A.Block(tuple(pre_b + [A.Assign(ref, b, e.loc)])),
                        (e.nid, "cond"), e.loc)
            return pre_c + [stmt], ref
        if isinstance(e, A.AssignExpr):
            return self.assign_expr(e)
        if isinstance(e, A.IncDec):
            pre, target = self.lvalue(e.target)
            bump = A.Assign(target, B.incdec_value(e.op, target, e.loc), e.loc)
            if e.prefix:
                return pre + [bump], target
            t = self.temp(e.type)
            ref = A.VarRef(t, t.type, e.loc)
            return pre + [A.Assign(ref, target, e.loc), bump], ref
        if isinstance(e, (A.CallExpr, A.Nondet)):
            t = self.temp(e.type)
            ref = A.VarRef(t, t.type, e.loc)
            return self.assign_to(ref, e, e.loc), ref
        raise TypeError(f"cannot lower {type(e).__name__}")

    def logical(self, e: A.Logical) -> tuple[list, object]:
        t = self.temp(INT)
        ref = A.VarRef(t, INT, e.loc)

        def setv(v: int) -> A.Assign:
            return A.Assign(ref, B.lit(v, INT, e.loc), e.loc)

        pre_l, l = self.expr(e.left)
        pre_r, r = self.expr(e.right)
        inner = A.If(r, A.Block((setv(1),)), A.Block((setv(0),)), (e.nid, "rhs"), e.loc)
        rhs = A.Block(tuple(pre_r + [inner]))
        if e.op == "&&":
            outer = A.If(l, rhs, A.Block((setv(0),)), (e.nid, "lhs"), e.loc)
        else:
            outer = A.If(l, A.Block((setv(1),)), rhs, (e.nid, "lhs"), e.loc)
        return pre_l + [outer], ref


def lower_decisions(ast: A.Ast) -> A.Ast:
    """Rewrite a parsed tree into lowered form (idempotent)."""
    if ast.lowered:
        return ast
    functions = tuple(_FunctionLowerer(f).run() for f in ast.functions)
    globals_ = []
    for d in ast.globals:
        init = None
        if d.init is not None:
            init = A.IntLit(B.const_eval(d.init), d.sym.type, d.loc)
        globals_.append(A.Decl(d.sym, init, d.array_init, d.loc))
    return A.Ast(functions, tuple(globals_), ast.entry, ast.arch, ast.error_function,
                 True, ast.global_count)
