"""Smart constructors that apply C's typing rules while building nodes."""
from __future__ import annotations

from . import ast as A
from .errors import TYPE_ERROR, error
from .inttypes import INT, TypeDesc, common_type, promote
from . import semantics

ARITH_OPS = ("+", "-", "*", "/", "%", "&", "|", "^")
SHIFT_OPS = ("<<", ">>")
COMPARE_OPS = ("==", "!=", "<", "<=", ">", ">=")


def _require_value(e, loc: A.Loc) -> None:
    if e.type is None:
        raise error(TYPE_ERROR, "void value used in expression", loc.line, loc.col)


def cast(e, t: TypeDesc, loc: A.Loc | None = None):
    _require_value(e, loc or e.loc)
    if e.type == t:
        return e
    return A.Cast(e, t, loc or e.loc)


def binary(op: str, left, right, loc: A.Loc = A.NOLOC) -> A.Binary:
    _require_value(left, loc)
    _require_value(right, loc)
    if op in SHIFT_OPS:
        lt, rt = promote(left.type), promote(right.type)
        return A.Binary(op, cast(left, lt), cast(right, rt), lt, loc)
    ct = common_type(left.type, right.type)
    if op in COMPARE_OPS:
        return A.Binary(op, cast(left, ct), cast(right, ct), INT, loc)
    if op in ARITH_OPS:
        return A.Binary(op, cast(left, ct), cast(right, ct), ct, loc)
    raise ValueError(op)


def unary(op: str, operand, loc: A.Loc = A.NOLOC) -> A.Unary:
    _require_value(operand, loc)
    pt = promote(operand.type)
    return A.Unary(op, cast(operand, pt), INT if op == "!" else pt, loc)


def conditional(cond, then, else_, nid: int, loc: A.Loc = A.NOLOC) -> A.Conditional:
    for e in (cond, then, else_):
        _require_value(e, loc)
    t = common_type(then.type, else_.type)
    return A.Conditional(cond, cast(then, t), cast(else_, t), t, nid, loc)


def logical(op: str, left, right, nid: int, loc: A.Loc = A.NOLOC) -> A.Logical:
    _require_value(left, loc)
    _require_value(right, loc)
    return A.Logical(op, left, right, INT, nid, loc)


def compound_value(op: str, target, value, loc: A.Loc = A.NOLOC):
    """Right-hand side of ``target op= value`` as a plain expression."""
    base = op[:-1]
    return cast(binary(base, target, value, loc), target.type, loc)


def incdec_value(op: str, target, loc: A.Loc = A.NOLOC):
    one = A.IntLit(1, INT, loc)
    return cast(binary("+" if op == "++" else "-", target, one, loc), target.type, loc)


def lit(value: int, t: TypeDesc = INT, loc: A.Loc = A.NOLOC) -> A.IntLit:
    return A.IntLit(value, t, loc)


def const_eval(e) -> int:
    """Evaluate a constant expression; raises FrontendError otherwise."""
    if isinstance(e, A.IntLit):
        return e.type.convert(e.value)
    if isinstance(e, A.Cast):
        return e.type.convert(const_eval(e.operand))
    if isinstance(e, A.Unary):
        return semantics.unary(e.op, const_eval(e.operand), e.type)
    if isinstance(e, A.Binary):
        a, b = const_eval(e.left), const_eval(e.right)
        if e.op in SHIFT_OPS:
            return semantics.shift(e.op, a, e.type, b, e.right.type)
        if e.op in COMPARE_OPS:
            return semantics.compare(e.op, a, b)
        try:
            return semantics.arith(e.op, a, b, e.type)
        except semantics.DivisionByZero:
            raise error(TYPE_ERROR, "division by zero in constant expression",
                        e.loc.line, e.loc.col) from None
    if isinstance(e, A.Logical):
        a = const_eval(e.left)
        if e.op == "&&":
            return int(bool(a) and bool(const_eval(e.right)))
        return int(bool(a) or bool(const_eval(e.right)))
    if isinstance(e, A.Conditional):
        return e.type.convert(const_eval(e.then) if const_eval(e.cond) else const_eval(e.else_))
    loc = getattr(e, "loc", A.NOLOC)
    raise error(TYPE_ERROR, "expression is not a compile-time constant", loc.line, loc.col)
