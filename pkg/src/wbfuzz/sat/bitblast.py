"""Translate bit-vector terms into a gate circuit and CNF."""
from __future__ import annotations

from typing import Iterable

from .circuit import F, T, Circuit
from .cnf import Cnf
from .terms import Term

MAX_WIDTH = 64


class WidthOverflow(ValueError):
    pass


class Blaster:
    def __init__(self, circuit: Circuit | None = None):
        self.c = circuit or Circuit()
        self.bits: dict = {}  # term id -> list of literals
        self.sym_bits: dict = {}  # symbol index -> list of variables

    def blast(self, root: Term) -> list:
        bits = self.bits
        stack = [root]
        while stack:
            n = stack[-1]
            if n.id in bits:
                stack.pop()
                continue
            if n.width > MAX_WIDTH:
                raise WidthOverflow(f"term wider than {MAX_WIDTH} bits")
            pending = [a for a in n.args if a.id not in bits]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            bits[n.id] = self._node(n)
        return bits[root.id]

    def _node(self, n: Term) -> list:
        c = self.c
        op = n.op
        if op == "const":
            return c.const(n.val, n.width)
        if op == "sym":
            vs = self.sym_bits.get(n.val)
            if vs is None:
                vs = c.inputs(n.width)
                self.sym_bits[n.val] = vs
            return list(vs)
        a = [self.bits[x.id] for x in n.args]
        if op == "add":
            return c.add(a[0], a[1])[0]
        if op == "sub":
            return c.sub(a[0], a[1])[0]
        if op == "mul":
            return c.mul(a[0], a[1])
        if op == "udiv":
            return c.udivrem(a[0], a[1])[0]
        if op == "urem":
            return c.udivrem(a[0], a[1])[1]
        if op == "sdiv":
            return c.sdivrem(a[0], a[1])[0]
        if op == "srem":
            return c.sdivrem(a[0], a[1])[1]
        if op == "and":
            return [c.and2(x, y) for x, y in zip(a[0], a[1])]
        if op == "or":
            return [c.or2(x, y) for x, y in zip(a[0], a[1])]
        if op == "xor":
            return [c.xor2(x, y) for x, y in zip(a[0], a[1])]
        if op == "not":
            return c.bnot(a[0])
        if op == "neg":
            return c.neg(a[0])
        if op in ("shl", "lshr", "ashr"):
            return c.shift(op, a[0], a[1])
        if op == "eq":
            return [c.eq(a[0], a[1])]
        if op == "ult":
            return [c.ult(a[0], a[1])]
        if op == "ule":
            return [-c.ult(a[1], a[0])]
        if op == "slt":
            return [c.slt(a[0], a[1])]
        if op == "sle":
            return [-c.slt(a[1], a[0])]
        if op == "ite":
            return c.ite(a[0][0], a[1], a[2])
        if op == "zext":
            return a[0] + [F] * (n.width - len(a[0]))
        if op == "sext":
            return a[0] + [a[0][-1]] * (n.width - len(a[0]))
        if op == "trunc":
            return a[0][: n.width]
        raise ValueError(f"cannot blast {op}")

    def to_cnf(self, asserted: Iterable[int] = ()) -> Cnf:
        clauses = [list(cl) for cl in self.c.clauses]
        for lit in asserted:
            clauses.append([lit])
        return Cnf(self.c.nvars, clauses, {k: list(v) for k, v in self.sym_bits.items()})


def bitblast_terms(target: Term, extra: Iterable[Term] = ()) -> Cnf:
    """CNF asserting the boolean ``target``; ``extra`` terms are encoded too
    (their definitions constrain nothing but enlarge the instance)."""
    b = Blaster()
    for t in extra:
        b.blast(t)
    lit = b.blast(target)[0]
    return b.to_cnf([lit])


def decode(cnf: Cnf, model: list) -> dict:
    """Symbol index -> unsigned value from a SAT model."""
    out = {}
    for sym, vs in cnf.bit_map.items():
        v = 0
        for i, var in enumerate(vs):
            if model[var]:
                v |= 1 << i
        out[sym] = v
    return out


__all__ = ["Blaster", "WidthOverflow", "bitblast_terms", "decode", "T", "F"]
