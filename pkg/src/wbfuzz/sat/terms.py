"""Hash-consed bit-vector terms.

Values are unsigned integers modulo ``2**width``; signedness lives in the
operators (``sdiv``, ``slt``, ``ashr``, ``sext`` ...). Width-1 terms double
as booleans. A :class:`TermBuilder` with ``simplify=True`` folds constants
and applies a few local rewrites while building.
"""
from __future__ import annotations

from typing import Iterable, Optional

BINARY_ARITH = ("add", "sub", "mul", "udiv", "urem", "sdiv", "srem", "and", "or", "xor")
SHIFTS = ("shl", "lshr", "ashr")
COMPARES = ("eq", "ult", "slt", "ule", "sle")
UNARY = ("not", "neg")
CASTS = ("zext", "sext", "trunc")
OPS = frozenset(BINARY_ARITH + SHIFTS + COMPARES + UNARY + CASTS + ("ite",))


class Term:
    __slots__ = ("op", "args", "width", "val", "id")

    def __init__(self, op: str, args: tuple, width: int, val, tid: int):
        self.op = op
        self.args = args
        self.width = width
        self.val = val  # constant value, or symbol index for 'sym'
        self.id = tid

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    def __repr__(self) -> str:
        if self.op == "const":
            return f"{self.val}:{self.width}"
        if self.op == "sym":
            return f"n{self.val}:{self.width}"
        return f"({self.op} {' '.join(map(repr, self.args))})"


def to_signed(v: int, w: int) -> int:
    return v - (1 << w) if v >> (w - 1) else v


def _sdiv(a: int, b: int, w: int) -> int:
    mask = (1 << w) - 1
    sa, sb = to_signed(a, w), to_signed(b, w)
    if sb == 0:
        return mask if sa >= 0 else 1
    q = abs(sa) // abs(sb)
    return (q if (sa < 0) == (sb < 0) else -q) & mask


def _srem(a: int, b: int, w: int) -> int:
    mask = (1 << w) - 1
    sa, sb = to_signed(a, w), to_signed(b, w)
    if sb == 0:
        return a
    r = abs(sa) % abs(sb)
    return (-r if sa < 0 else r) & mask


def eval_op(op: str, vals: list, width: int, args: tuple) -> int:
    """Concrete semantics of one operator (``args`` supply operand widths)."""
    mask = (1 << width) - 1
    if op == "add":
        return (vals[0] + vals[1]) & mask
    if op == "sub":
        return (vals[0] - vals[1]) & mask
    if op == "mul":
        return (vals[0] * vals[1]) & mask
    if op == "udiv":
        return mask if vals[1] == 0 else vals[0] // vals[1]
    if op == "urem":
        return vals[0] if vals[1] == 0 else vals[0] % vals[1]
    if op == "sdiv":
        return _sdiv(vals[0], vals[1], width)
    if op == "srem":
        return _srem(vals[0], vals[1], width)
    if op == "and":
        return vals[0] & vals[1]
    if op == "or":
        return vals[0] | vals[1]
    if op == "xor":
        return vals[0] ^ vals[1]
    if op == "not":
        return vals[0] ^ mask
    if op == "neg":
        return (-vals[0]) & mask
    if op in SHIFTS:
        a, c = vals
        if c >= width:
            if op == "ashr" and a >> (width - 1):
                return mask
            return 0
        if op == "shl":
            return (a << c) & mask
        if op == "lshr":
            return a >> c
        return (to_signed(a, width) >> c) & mask
    if op in COMPARES:
        a, b = vals
        w = args[0].width
        if op == "eq":
            return int(a == b)
        if op == "ult":
            return int(a < b)
        if op == "ule":
            return int(a <= b)
        if op == "slt":
            return int(to_signed(a, w) < to_signed(b, w))
        return int(to_signed(a, w) <= to_signed(b, w))
    if op == "ite":
        return vals[1] if vals[0] else vals[2]
    if op == "zext":
        return vals[0]
    if op == "sext":
        return to_signed(vals[0], args[0].width) & mask
    if op == "trunc":
        return vals[0] & mask
    raise ValueError(op)


class TermBuilder:
    def __init__(self, simplify: bool = True):
        self.simplify = simplify
        self._table: dict = {}
        self.terms: list = []
        self.true = self.const(1, 1)
        self.false = self.const(0, 1)

    def _mk(self, op: str, args: tuple, width: int, val=None) -> Term:
        key = (op, tuple(a.id for a in args), width, val)
        t = self._table.get(key)
        if t is None:
            t = Term(op, args, width, val, len(self.terms))
            self._table[key] = t
            self.terms.append(t)
        return t

    def const(self, value: int, width: int) -> Term:
        return self._mk("const", (), width, value & ((1 << width) - 1))

    def sym(self, index: int, width: int) -> Term:
        return self._mk("sym", (), width, index)

    # ------------------------------------------------------------ operators

    def op(self, op: str, *args: Term, width: Optional[int] = None) -> Term:
        if op not in OPS:
            raise ValueError(f"unknown operator {op!r}")
        if op in COMPARES:
            w = 1
        elif op in CASTS:
            w = width
        elif op == "ite":
            w = args[1].width
        else:
            w = args[0].width
        if self.simplify:
            r = self._simplify(op, args, w)
            if r is not None:
                return r
        return self._mk(op, args, w)

    def _simplify(self, op: str, args: tuple, w: int) -> Optional[Term]:
        if all(a.op == "const" for a in args):
            return self.const(eval_op(op, [a.val for a in args], w, args), w)
        mask = (1 << w) - 1
        if op == "ite":
            c, a, b = args
            if c.op == "const":
                return a if c.val else b
            if a is b:
                return a
            if w == 1 and a.op == "const" and b.op == "const":
                return c if a.val else self.op("not", c)
            if c.op == "not":
                return self.op("ite", c.args[0], b, a)
            return None
        if op in ("add", "sub", "or", "xor", "shl", "lshr", "ashr") and args[1].op == "const" \
                and args[1].val == 0:
            return args[0]
        if op in ("add", "or", "xor") and args[0].op == "const" and args[0].val == 0:
            return args[1]
        if op == "add" and args[1].op == "const" and args[0].op == "add" \
                and args[0].args[1].op == "const":
            inner = args[0]
            return self.op("add", inner.args[0],
                           self.const(inner.args[1].val + args[1].val, w))
        if op == "and":
            a, b = args
            for x, y in ((a, b), (b, a)):
                if x.op == "const":
                    if x.val == 0:
                        return x
                    if x.val == mask:
                        return y
            if a is b:
                return a
        if op == "or":
            a, b = args
            for x, y in ((a, b), (b, a)):
                if x.op == "const" and x.val == mask:
                    return x
            if a is b:
                return a
        if op == "xor" and args[0] is args[1]:
            return self.const(0, w)
        if op == "mul":
            a, b = args
            for x, y in ((a, b), (b, a)):
                if x.op == "const":
                    if x.val == 0:
                        return x
                    if x.val == 1:
                        return y
        if op in ("udiv", "sdiv") and args[1].op == "const" and args[1].val == 1:
            return args[0]
        if op == "not" and args[0].op == "not":
            return args[0].args[0]
        if op == "neg" and args[0].op == "neg":
            return args[0].args[0]
        if op in COMPARES:
            a, b = args
            if a is b:
                return self.true if op in ("eq", "ule", "sle") else self.false
            if op == "eq":
                if a.op == "const" and b.op != "const":
                    a, b = b, a
                if b.op == "const":
                    if a.op == "ite" and a.args[1].op == "const" and a.args[2].op == "const":
                        c, x, y = a.args
                        hx, hy = x.val == b.val, y.val == b.val
                        if hx and hy:
                            return self.true
                        if hx:
                            return c
                        if hy:
                            return self.op("not", c)
                        return self.false
                    if a.op in ("zext", "sext") and a.args[0].width == 1 and b.val in (0, 1):
                        inner = a.args[0]
                        return inner if b.val else self.op("not", inner)
                    if a.width == 1:
                        return a if b.val else self.op("not", a)
        if op in CASTS:
            a = args[0]
            if a.width == w:
                return a
            if op == "trunc" and a.op in ("zext", "sext") and a.args[0].width == w:
                return a.args[0]
            if op in ("zext", "sext") and a.op == "ite" and a.args[1].op == "const" \
                    and a.args[2].op == "const":
                return self.op("ite", a.args[0], self.op(op, a.args[1], width=w),
                               self.op(op, a.args[2], width=w))
        return None

    # ---------------------------------------------------------- conveniences

    def bnot(self, a: Term) -> Term:
        return self.op("not", a)

    def band(self, a: Term, b: Term) -> Term:
        return self.op("and", a, b)

    def bor(self, a: Term, b: Term) -> Term:
        return self.op("or", a, b)

    def ite(self, c: Term, a: Term, b: Term) -> Term:
        return self.op("ite", c, a, b)

    def nonzero(self, a: Term) -> Term:
        if a.width == 1:
            return a
        return self.bnot(self.op("eq", a, self.const(0, a.width)))

    def any_of(self, terms: Iterable[Term]) -> Term:
        acc = self.false
        for t in terms:
            acc = self.bor(acc, t)
        return acc

    def rebuild(self, t: Term, memo: dict, sym_map=None) -> Term:
        """Copy the DAG of ``t`` (built elsewhere) into this builder."""
        stack = [t]
        while stack:
            n = stack[-1]
            if n.id in memo:
                stack.pop()
                continue
            pending = [a for a in n.args if a.id not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            if n.op == "const":
                memo[n.id] = self.const(n.val, n.width)
            elif n.op == "sym":
                memo[n.id] = self.sym(n.val, n.width) if sym_map is None else sym_map(n)
            else:
                new_args = tuple(memo[a.id] for a in n.args)
                memo[n.id] = self.op(n.op, *new_args, width=n.width)
        return memo[t.id]


def evaluate(roots: Iterable[Term], sym_values, memo: Optional[dict] = None) -> dict:
    """Concrete values (term id -> int) of ``roots``; symbols read ``sym_values[index]``
    (missing symbols default to 0)."""
    memo = {} if memo is None else memo
    for root in roots:
        stack = [root]
        while stack:
            n = stack[-1]
            if n.id in memo:
                stack.pop()
                continue
            if n.op == "const":
                memo[n.id] = n.val
                stack.pop()
                continue
            if n.op == "sym":
                memo[n.id] = sym_values.get(n.val, 0) & ((1 << n.width) - 1)
                stack.pop()
                continue
            if n.op == "ite":
                c = n.args[0]
                if c.id not in memo:
                    stack.append(c)
                    continue
                branch = n.args[1] if memo[c.id] else n.args[2]
                if branch.id not in memo:
                    stack.append(branch)
                    continue
                memo[n.id] = memo[branch.id]
                stack.pop()
                continue
            pending = [a for a in n.args if a.id not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            memo[n.id] = eval_op(n.op, [memo[a.id] for a in n.args], n.width, n.args)
    return memo


def support(roots: Iterable[Term]) -> set:
    """Ids of every term reachable from ``roots``."""
    seen: set = set()
    stack = list(roots)
    while stack:
        n = stack.pop()
        if n.id in seen:
            continue
        seen.add(n.id)
        stack.extend(n.args)
    return seen
