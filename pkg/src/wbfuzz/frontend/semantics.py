"""Concrete integer semantics shared by every engine.

Values are Python ints already normalised to their type. Signed overflow
wraps; shift counts are read as unsigned and a count at or beyond the
operand width yields 0 (or all sign bits for ``>>`` of a negative value).
"""
from __future__ import annotations

from .inttypes import TypeDesc


class DivisionByZero(ArithmeticError):
    pass


def c_div(a: int, b: int) -> int:
    if b == 0:
        raise DivisionByZero()
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def c_rem(a: int, b: int) -> int:
    return a - b * c_div(a, b)


def arith(op: str, a: int, b: int, t: TypeDesc) -> int:
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        r = c_div(a, b)
    elif op == "%":
        r = c_rem(a, b)
    elif op == "&":
        r = a & b
    elif op == "|":
        r = a | b
    elif op == "^":
        r = a ^ b
    else:
        raise ValueError(op)
    return t.wrap(r)


def shift(op: str, a: int, t: TypeDesc, count: int, count_type: TypeDesc) -> int:
    c = count & count_type.mask
    if c >= t.width:
        return -1 if (op == ">>" and a < 0) else 0
    if op == "<<":
        return t.wrap(a << c)
    return a >> c


def compare(op: str, a: int, b: int) -> int:
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    raise ValueError(op)


def unary(op: str, a: int, t: TypeDesc) -> int:
    if op == "-":
        return t.wrap(-a)
    if op == "~":
        return t.wrap(~a)
    if op == "!":
        return int(a == 0)
    raise ValueError(op)
