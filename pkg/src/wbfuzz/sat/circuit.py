"""Gate-level circuit builder with Tseitin clauses and bit-vector operators.

Literals are DIMACS integers; variable 1 is the constant true. Gates are
structurally hashed and constant-propagated, so a circuit whose inputs are
constants collapses without emitting clauses. Bit-vectors are lists of
literals, least significant bit first.
"""
from __future__ import annotations

T = 1
F = -1


class Circuit:
    def __init__(self):
        self.nvars = 1
        self.clauses: list = [[T]]
        self.gates: list = []  # (out var, kind, inputs...) in topological order
        self._cache: dict = {}

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def inputs(self, width: int) -> list:
        return [self.new_var() for _ in range(width)]

    # ---------------------------------------------------------------- gates

    def and2(self, a: int, b: int) -> int:
        if a == F or b == F or a == -b:
            return F
        if a == T or a == b:
            return b
        if b == T:
            return a
        if a > b:
            a, b = b, a
        key = ("a", a, b)
        o = self._cache.get(key)
        if o is None:
            o = self.new_var()
            self.clauses += [[-o, a], [-o, b], [o, -a, -b]]
            self.gates.append((o, "and", a, b))
            self._cache[key] = o
        return o

    def or2(self, a: int, b: int) -> int:
        return -self.and2(-a, -b)

    def xor2(self, a: int, b: int) -> int:
        if a == F:
            return b
        if b == F:
            return a
        if a == T:
            return -b
        if b == T:
            return -a
        if a == b:
            return F
        if a == -b:
            return T
        neg = False
        if a < 0:
            a, neg = -a, not neg
        if b < 0:
            b, neg = -b, not neg
        if a > b:
            a, b = b, a
        key = ("x", a, b)
        o = self._cache.get(key)
        if o is None:
            o = self.new_var()
            self.clauses += [[-o, a, b], [-o, -a, -b], [o, -a, b], [o, a, -b]]
            self.gates.append((o, "xor", a, b))
            self._cache[key] = o
        return -o if neg else o

    def mux(self, s: int, a: int, b: int) -> int:
        """``s ? a : b``"""
        if s == T or a == b:
            return a
        if s == F:
            return b
        if a == -b:
            return -self.xor2(s, a)
        if a == T or a == s:
            return self.or2(s, b)
        if a == F or a == -s:
            return self.and2(-s, b)
        if b == T or b == -s:
            return self.or2(-s, a)
        if b == F or b == s:
            return self.and2(s, a)
        if s < 0:
            s, a, b = -s, b, a
        key = ("m", s, a, b)
        o = self._cache.get(key)
        if o is None:
            o = self.new_var()
            self.clauses += [[-s, -a, o], [-s, a, -o], [s, -b, o], [s, b, -o],
                             [-a, -b, o], [a, b, -o]]
            self.gates.append((o, "mux", s, a, b))
            self._cache[key] = o
        return o

    def maj(self, a: int, b: int, c: int) -> int:
        for x, y, z in ((a, b, c), (b, a, c), (c, a, b)):
            if x == T:
                return self.or2(y, z)
            if x == F:
                return self.and2(y, z)
        if a == b or a == c:
            return a
        if b == c:
            return b
        if a == -b:
            return c
        if a == -c:
            return b
        if b == -c:
            return a
        a, b, c = sorted((a, b, c))
        key = ("j", a, b, c)
        o = self._cache.get(key)
        if o is None:
            o = self.new_var()
            self.clauses += [[-a, -b, o], [-a, -c, o], [-b, -c, o],
                             [a, b, -o], [a, c, -o], [b, c, -o]]
            self.gates.append((o, "maj", a, b, c))
            self._cache[key] = o
        return o

    def and_all(self, lits) -> int:
        acc = T
        for x in lits:
            acc = self.and2(acc, x)
        return acc

    def or_all(self, lits) -> int:
        acc = F
        for x in lits:
            acc = self.or2(acc, x)
        return acc

    # ----------------------------------------------------------- bit-vectors

    @staticmethod
    def const(value: int, width: int) -> list:
        return [T if (value >> i) & 1 else F for i in range(width)]

    def add(self, a: list, b: list, cin: int = F) -> tuple:
        out = []
        c = cin
        for x, y in zip(a, b):
            t = self.xor2(x, y)
            out.append(self.xor2(t, c))
            c = self.maj(x, y, c)
        return out, c

    def bnot(self, a: list) -> list:
        return [-x for x in a]

    def neg(self, a: list) -> list:
        return self.add(self.bnot(a), self.const(0, len(a)), T)[0]

    def sub(self, a: list, b: list) -> tuple:
        """(a - b, carry) where carry is true iff no borrow (a >= b unsigned)."""
        return self.add(a, self.bnot(b), T)

    def mul(self, a: list, b: list) -> list:
        w = len(a)
        acc = self.const(0, w)
        for i in range(w):
            if b[i] == F:
                continue
            pp = [self.and2(a[j - i], b[i]) for j in range(i, w)]
            acc = acc[:i] + self.add(acc[i:], pp)[0]
        return acc

    def udivrem(self, a: list, b: list) -> tuple:
        """Restoring division; x/0 gives all ones and x%0 gives x."""
        w = len(a)
        rem = self.const(0, w)
        q = [F] * w
        bx = b + [F]
        for i in range(w - 1, -1, -1):
            r_ext = [a[i]] + rem
            diff, ge = self.sub(r_ext, bx)
            q[i] = ge
            rem = [self.mux(ge, d, r) for d, r in zip(diff[:w], r_ext[:w])]
        return q, rem

    def sdivrem(self, a: list, b: list) -> tuple:
        sa, sb = a[-1], b[-1]
        ua = self.ite(sa, self.neg(a), a)
        ub = self.ite(sb, self.neg(b), b)
        q, r = self.udivrem(ua, ub)
        q = self.ite(self.xor2(sa, sb), self.neg(q), q)
        r = self.ite(sa, self.neg(r), r)
        return q, r

    def ite(self, c: int, a: list, b: list) -> list:
        return [self.mux(c, x, y) for x, y in zip(a, b)]

    def shift(self, kind: str, a: list, count: list) -> list:
        w = len(a)
        fill = a[-1] if kind == "ashr" else F
        stages = max(1, (w - 1).bit_length())
        res = list(a)
        for s in range(min(stages, len(count))):
            k = 1 << s
            if kind == "shl":
                shifted = [F] * k + res[: w - k] if k < w else [F] * w
            else:
                shifted = res[k:] + [fill] * k if k < w else [fill] * w
            res = [self.mux(count[s], x, y) for x, y in zip(shifted, res)]
        big = self.or_all(count[stages:])
        return [self.mux(big, fill, x) for x in res]

    def eq(self, a: list, b: list) -> int:
        return self.and_all(-self.xor2(x, y) for x, y in zip(a, b))

    def ult(self, a: list, b: list) -> int:
        lt = F
        for x, y in zip(a, b):
            lt = self.mux(self.xor2(x, y), y, lt)
        return lt

    def slt(self, a: list, b: list) -> int:
        return self.ult(a[:-1] + [-a[-1]], b[:-1] + [-b[-1]])

    # ----------------------------------------------------- batch evaluation

    def evaluate_parallel(self, inputs: dict, lanes: int) -> list:
        """Evaluate every gate over ``lanes`` assignments at once.

        ``inputs`` maps input variables to integers whose bit j is that
        variable's value in lane j. Returns per-variable lane masks; unset
        inputs read as 0.
        """
        full = (1 << lanes) - 1
        vals = [0] * (self.nvars + 1)
        vals[1] = full
        for v, m in inputs.items():
            vals[v] = m
        for g in self.gates:
            ins = [vals[x] if x > 0 else vals[-x] ^ full for x in g[2:]]
            kind = g[1]
            if kind == "and":
                r = ins[0] & ins[1]
            elif kind == "xor":
                r = ins[0] ^ ins[1]
            elif kind == "mux":
                s, x, y = ins
                r = (s & x) | (~s & y & full)
            else:
                x, y, z = ins
                r = (x & y) | (x & z) | (y & z)
            vals[g[0]] = r
        return vals

    @staticmethod
    def lane_value(vals: list, lit: int, full: int) -> int:
        return vals[lit] if lit > 0 else vals[-lit] ^ full

    def check_clauses_parallel(self, vals: list, lanes: int, extra: tuple = ()) -> int:
        """Mask of lanes in which every clause holds."""
        full = (1 << lanes) - 1
        ok = full
        for clause in list(self.clauses) + list(extra):
            acc = 0
            for lit in clause:
                acc |= vals[lit] if lit > 0 else vals[-lit] ^ full
            ok &= acc
        return ok
