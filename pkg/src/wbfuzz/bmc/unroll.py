"""Loop unwinding and call inlining.

The result is a loop-free, call-free tree: every :class:`~A.Loop` becomes an
:class:`Unwound` node standing for ``k`` guarded copies of its body followed
by the unwinding cut, and every call becomes an :class:`Inlined` node
holding the callee's (already unwound) body.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast as A
from ..frontend.errors import UNSUPPORTED, error
from ..instrument import InstrumentedProgram

MAX_INLINE_DEPTH = 16


@dataclass(frozen=True)
class Unwound:
    prelude: A.Block
    cond: object
    body: A.Block
    step: A.Block
    do_while: bool
    origin: tuple
    k: int
    loc: A.Loc = field(default=A.NOLOC, compare=False)


@dataclass(frozen=True)
class Inlined:
    func: str
    params: tuple  # callee parameter symbols
    args: tuple  # pure argument expressions
    body: A.Block
    target: Optional[object]  # VarRef/Index receiving the result, or None
    ret_type: object
    loc: A.Loc = field(default=A.NOLOC, compare=False)


@dataclass(frozen=True)
class LoopFreeProgram:
    body: A.Block
    globals: tuple
    global_count: int
    k: int
    prog: InstrumentedProgram = field(compare=False, repr=False)


class _Unroller:
    def __init__(self, ast: A.Ast, k: int):
        self.ast = ast
        self.k = k

    def block(self, b: A.Block, depth: int) -> A.Block:
        out = []
        for s in b.stmts:
            out.append(self.stmt(s, depth))
        return A.Block(tuple(out), b.loc)

    def seq(self, stmts, depth: int) -> A.Block:
        return A.Block(tuple(self.stmt(s, depth) for s in stmts))

    def stmt(self, s, depth: int):
        if isinstance(s, A.Block):
            return self.block(s, depth)
        if isinstance(s, A.If):
            then = self.stmt(s.then, depth)
            else_ = self.stmt(s.else_, depth) if s.else_ is not None else None
            return A.If(s.cond, then, else_, s.origin, s.loc)
        if isinstance(s, A.Loop):
            return Unwound(self.seq(s.prelude, depth), s.cond, self.block(s.body, depth),
                           self.seq(s.step, depth), s.do_while, s.origin, self.k, s.loc)
        if isinstance(s, A.Switch):
            sections = tuple(A.SwitchSection(sec.labels, tuple(self.stmt(x, depth)
                                                                for x in sec.body), sec.loc)
                             for sec in s.sections)
            return A.Switch(s.tag, sections, s.origin, s.loc)
        if isinstance(s, A.Assign) and isinstance(s.value, A.CallExpr):
            return self.inline(s.value, s.target, depth, s.loc)
        if isinstance(s, A.ExprStmt) and isinstance(s.expr, A.CallExpr):
            return self.inline(s.expr, None, depth, s.loc)
        return s

    def inline(self, call: A.CallExpr, target, depth: int, loc) -> Inlined:
        if depth >= MAX_INLINE_DEPTH:
            raise error(UNSUPPORTED, f"call nesting deeper than {MAX_INLINE_DEPTH}",
                        loc.line, loc.col)
        fn = self.ast.function(call.func)
        body = self.block(fn.body, depth + 1)
        return Inlined(fn.name, fn.params, call.args, body, target, fn.ret_type, loc)


def unroll(prog: InstrumentedProgram, k: int) -> LoopFreeProgram:
    if k < 1:
        raise ValueError("unwinding bound must be at least 1")
    ast = prog.ast
    if not ast.lowered:
        raise ValueError("unroll expects a lowered program")
    u = _Unroller(ast, k)
    body = u.block(ast.function(ast.entry).body, 0)
    return LoopFreeProgram(body, ast.globals, ast.global_count, k, prog)


def walk_loop_free(stmt):
    """Preorder over a loop-free tree, descending into unwound and inlined bodies."""
    yield stmt
    if isinstance(stmt, A.Block):
        for s in stmt.stmts:
            yield from walk_loop_free(s)
    elif isinstance(stmt, A.If):
        yield from walk_loop_free(stmt.then)
        if stmt.else_ is not None:
            yield from walk_loop_free(stmt.else_)
    elif isinstance(stmt, Unwound):
        yield from walk_loop_free(stmt.prelude)
        yield from walk_loop_free(stmt.body)
        yield from walk_loop_free(stmt.step)
    elif isinstance(stmt, Inlined):
        yield from walk_loop_free(stmt.body)
    elif isinstance(stmt, A.Switch):
        for sec in stmt.sections:
            for s in sec.body:
                yield from walk_loop_free(s)
