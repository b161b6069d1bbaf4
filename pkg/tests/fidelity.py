"""Bit-blast fidelity harness.

Each operator is blasted once over two symbolic operands. The resulting
circuit is then evaluated on many operand pairs at once (one bit lane per
pair), every clause is checked in every lane, and the decoded output is
compared to the interpreter's arithmetic. Because each Tseitin gate fixes
its output given its inputs, a lane that satisfies all clauses shows the
CNF with those inputs fixed is satisfiable and that every model decodes
to the same output. A sample of pairs also goes through the CDCL solver
with the inputs fixed by unit clauses.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from wbfuzz.frontend.inttypes import TypeDesc
from wbfuzz.frontend.semantics import arith, compare, shift
from wbfuzz.sat import solve_cnf
from wbfuzz.sat.bitblast import Blaster, decode
from wbfuzz.sat.terms import TermBuilder

# C operator -> (signed term op, unsigned term op)
OPERATORS = {
    "+": ("add", "add"),
    "-": ("sub", "sub"),
    "*": ("mul", "mul"),
    "/": ("sdiv", "udiv"),
    "%": ("srem", "urem"),
    "<<": ("shl", "shl"),
    ">>": ("ashr", "lshr"),
    "<": ("slt", "ult"),
    "<=": ("sle", "ule"),
    "==": ("eq", "eq"),
}
WIDTHS = (8, 16, 32)
COMPARISONS = {"<", "<=", "=="}


@dataclass
class FidelityResult:
    op: str
    width: int
    signed: bool
    pairs: int
    mismatches: int
    unsat_lanes: int
    solver_checked: int
    solver_mismatches: int

    @property
    def ok(self) -> bool:
        return self.mismatches == 0 and self.unsat_lanes == 0 and self.solver_mismatches == 0


def expected(op: str, t: TypeDesc, a: int, b: int) -> int:
    """Interpreter result for unsigned bit patterns ``a``, ``b``, as an unsigned pattern."""
    sa, sb = t.wrap(a), t.wrap(b)
    if op in COMPARISONS:
        return compare(op, sa, sb)
    if op in ("<<", ">>"):
        return shift(op, sa, t, sb, t) & t.mask
    return arith(op, sa, sb, t) & t.mask


def sample_pairs(op: str, width: int, n: int, rng: random.Random) -> list:
    mask = (1 << width) - 1
    pairs = []
    while len(pairs) < n:
        a = rng.getrandbits(width)
        r = rng.random()
        if op in ("<<", ">>") and r < 0.6:
            b = rng.randrange(width + 2)
        elif r < 0.1:
            b = rng.choice((0, 1, mask, mask >> 1, (mask >> 1) + 1))
        elif r < 0.2:
            b = a
        else:
            b = rng.getrandbits(width)
        if op in ("/", "%") and b == 0:
            continue  # the interpreter traps; the solver path excludes these
        pairs.append((a, b))
    return pairs


def check_operator(op: str, width: int, signed: bool, pairs: list, solver_sample: int = 0,
                   rng: random.Random | None = None) -> FidelityResult:
    t = TypeDesc("signed" if signed else "unsigned", width)
    tb = TermBuilder(simplify=False)
    x, y = tb.sym(0, width), tb.sym(1, width)
    term_op = OPERATORS[op][0 if signed else 1]
    out = tb.op(term_op, x, y, width=1 if op in COMPARISONS else width)
    bl = Blaster()
    bl.blast(x)
    bl.blast(y)
    out_bits = bl.blast(out)
    c = bl.c
    lanes = len(pairs)
    full = (1 << lanes) - 1
    inputs = {}
    for sym, (idx) in ((0, 0), (1, 1)):
        for bit, var in enumerate(bl.sym_bits[sym]):
            m = 0
            for lane, pair in enumerate(pairs):
                if (pair[idx] >> bit) & 1:
                    m |= 1 << lane
            inputs[var] = m
    vals = c.evaluate_parallel(inputs, lanes)
    sat_mask = c.check_clauses_parallel(vals, lanes)
    unsat_lanes = lanes - bin(sat_mask).count("1")
    masks = [c.lane_value(vals, lit, full) for lit in out_bits]
    # transpose bit masks into per-lane values via binary strings
    strings = [format(m, f"0{lanes}b")[::-1] for m in masks]
    mismatches = 0
    for lane, (a, b) in enumerate(pairs):
        got = 0
        for bit, s in enumerate(strings):
            if s[lane] == "1":
                got |= 1 << bit
        if got != expected(op, t, a, b):
            mismatches += 1
    solver_mismatches = 0
    checked = 0
    if solver_sample:
        rng = rng or random.Random(0)
        out_vars = out_bits
        for a, b in rng.sample(pairs, min(solver_sample, len(pairs))):
            cnf = bl.to_cnf()
            for sym, val in ((0, a), (1, b)):
                for bit, var in enumerate(bl.sym_bits[sym]):
                    cnf.clauses.append([var if (val >> bit) & 1 else -var])
            res = solve_cnf(cnf)
            checked += 1
            if not res.is_sat:
                solver_mismatches += 1
                continue
            model = res.model
            got = 0
            for bit, lit in enumerate(out_vars):
                v = model[abs(lit)] if lit > 0 else not model[abs(lit)]
                if v:
                    got |= 1 << bit
            decoded = decode(cnf, model)
            if got != expected(op, t, a, b) or decoded[0] != a or decoded[1] != b:
                solver_mismatches += 1
    return FidelityResult(op, width, signed, lanes, mismatches, unsat_lanes, checked,
                          solver_mismatches)


def run_all(n: int = 10_000, seed: int = 2021, solver_sample: int = 10) -> list:
    rng = random.Random(seed)
    results = []
    for op in OPERATORS:
        for width in WIDTHS:
            for signed in (True, False):
                pairs = sample_pairs(op, width, n, rng)
                results.append(check_operator(op, width, signed, pairs, solver_sample, rng))
    return results
