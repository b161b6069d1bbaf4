"""Typed MiniC syntax tree.

Nodes are frozen dataclasses; equality is structural and ignores source
locations and node ids. Decision nodes carry an ``origin`` of the form
``(nid, role)`` which survives lowering, so goals can be attached to the
same source decision in both the parsed and the lowered tree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .inttypes import TypeDesc

Origin = tuple  # (nid, role)


@dataclass(frozen=True)
class Loc:
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOLOC = Loc()


@dataclass(frozen=True)
class Symbol:
    name: str
    type: TypeDesc
    is_global: bool
    slot: int
    array_size: Optional[int] = None

    @property
    def is_array(self) -> bool:
        return self.array_size is not None


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class IntLit:
    value: int
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class VarRef:
    sym: Symbol
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Index:
    sym: Symbol
    index: "Expr"
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Binary:
    # comparison operands are already converted to their common type
    op: str
    left: "Expr"
    right: "Expr"
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Cast:
    operand: "Expr"
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Logical:
    op: str  # '&&' or '||'
    left: "Expr"
    right: "Expr"
    type: TypeDesc
    nid: int = field(default=0, compare=False)
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Conditional:
    cond: "Expr"
    then: "Expr"
    else_: "Expr"
    type: TypeDesc
    nid: int = field(default=0, compare=False)
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class AssignExpr:
    op: str  # '=', '+=', ...
    target: Union[VarRef, Index]
    value: "Expr"
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class IncDec:
    op: str  # '++' or '--'
    prefix: bool
    target: Union[VarRef, Index]
    type: TypeDesc
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class CallExpr:
    func: str
    args: tuple
    type: Optional[TypeDesc]  # None for void
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Nondet:
    type: TypeDesc
    name: str
    loc: Loc = field(default=NOLOC, compare=False)


Expr = Union[IntLit, VarRef, Index, Unary, Binary, Cast, Logical, Conditional,
             AssignExpr, IncDec, CallExpr, Nondet]

PURE_EXPRS = (IntLit, VarRef, Index, Unary, Binary, Cast)


# ----------------------------------------------------------------- statements


@dataclass(frozen=True)
class Block:
    stmts: tuple
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Decl:
    sym: Symbol
    init: Optional[Expr] = None
    array_init: Optional[tuple] = None
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Assign:
    """Lowered assignment; ``value`` is pure, a call or a nondet read."""
    target: Union[VarRef, Index]
    value: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    else_: Optional["Stmt"]
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class DoWhile:
    body: "Stmt"
    cond: Expr
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class For:
    init: Optional["Stmt"]
    cond: Optional[Expr]
    step: Optional[Expr]
    body: "Stmt"
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Loop:
    """Lowered loop.

    while/for: ``prelude; if (!cond) exit; body; step`` repeated.
    do-while:  ``body; step; prelude; if (!cond) exit`` repeated.
    ``continue`` resumes at ``step``.
    """
    prelude: tuple
    cond: Expr
    body: Block
    step: tuple
    do_while: bool
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class SwitchSection:
    labels: tuple  # case values; None marks `default`
    body: tuple
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Switch:
    tag: Expr
    sections: tuple
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)

    @property
    def has_default(self) -> bool:
        return any(None in s.labels for s in self.sections)


@dataclass(frozen=True)
class Break:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Continue:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class ErrorCall:
    origin: Origin
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Assume:
    cond: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Abort:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Exit:
    code: Expr
    loc: Loc = field(default=NOLOC, compare=False)


Stmt = Union[Block, Decl, ExprStmt, Assign, If, While, DoWhile, For, Loop, Switch,
             Break, Continue, Return, ErrorCall, Assume, Abort, Exit]


# ------------------------------------------------------------------ top level


@dataclass(frozen=True)
class FunctionDef:
    name: str
    ret_type: Optional[TypeDesc]
    params: tuple
    body: Block
    frame_size: int
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Ast:
    functions: tuple
    globals: tuple  # Decl nodes
    entry: str = "main"
    arch: int = 32
    error_function: str = "reach_error"
    lowered: bool = False
    global_count: int = 0

    def function(self, name: str) -> FunctionDef:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def function_map(self) -> dict:
        return {f.name: f for f in self.functions}


def walk_stmts(stmt):
    """Yield ``stmt`` and every statement nested in it, preorder."""
    yield stmt
    if isinstance(stmt, Block):
        for s in stmt.stmts:
            yield from walk_stmts(s)
    elif isinstance(stmt, If):
        yield from walk_stmts(stmt.then)
        if stmt.else_ is not None:
            yield from walk_stmts(stmt.else_)
    elif isinstance(stmt, (While, DoWhile)):
        yield from walk_stmts(stmt.body)
    elif isinstance(stmt, For):
        if stmt.init is not None:
            yield from walk_stmts(stmt.init)
        yield from walk_stmts(stmt.body)
    elif isinstance(stmt, Loop):
        for s in stmt.prelude:
            yield from walk_stmts(s)
        yield from walk_stmts(stmt.body)
        for s in stmt.step:
            yield from walk_stmts(s)
    elif isinstance(stmt, Switch):
        for sec in stmt.sections:
            for s in sec.body:
                yield from walk_stmts(s)


def walk_expr(expr):
    yield expr
    if isinstance(expr, Index):
        yield from walk_expr(expr.index)
    elif isinstance(expr, (Unary, Cast)):
        yield from walk_expr(expr.operand)
    elif isinstance(expr, (Binary, Logical)):
        yield from walk_expr(expr.left)
        yield from walk_expr(expr.right)
    elif isinstance(expr, Conditional):
        yield from walk_expr(expr.cond)
        yield from walk_expr(expr.then)
        yield from walk_expr(expr.else_)
    elif isinstance(expr, AssignExpr):
        yield from walk_expr(expr.target)
        yield from walk_expr(expr.value)
    elif isinstance(expr, IncDec):
        yield from walk_expr(expr.target)
    elif isinstance(expr, CallExpr):
        for a in expr.args:
            yield from walk_expr(a)


def stmt_exprs(stmt) -> list:
    """Expressions directly owned by ``stmt`` (not by nested statements)."""
    if isinstance(stmt, Decl):
        return [stmt.init] if stmt.init is not None else []
    if isinstance(stmt, ExprStmt):
        return [stmt.expr]
    if isinstance(stmt, Assign):
        return [stmt.target, stmt.value]
    if isinstance(stmt, (If, While, DoWhile, Loop, Assume)):
        return [stmt.cond]
    if isinstance(stmt, For):
        return [e for e in (stmt.cond, stmt.step) if e is not None]
    if isinstance(stmt, Switch):
        return [stmt.tag]
    if isinstance(stmt, Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, Exit):
        return [stmt.code]
    return []
