"""Coverage-guided mutational fuzzing over input tapes."""
from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .frontend import ast as A
from .frontend.inttypes import INT, TypeDesc
from .goaltable import GoalTable
from .instrument import InstrumentedProgram
from .interp import execute

OPS = ("bitflip", "delta", "boundary-zero", "boundary-one", "boundary-minus-one",
       "boundary-min", "boundary-max", "dictionary", "append", "truncate", "splice")
_NEEDS_VALUE = {op for op in OPS if op not in ("append", "truncate", "splice")}

FUZZ_STEP_LIMIT = 200_000
MAX_EXTENSION = 4096  # fresh values handed out per run once the tape is exhausted
ENERGY_BOOST = 3.0
ENERGY_HALF_LIFE = 1000


@dataclass
class CorpusEntry:
    tape: tuple
    features: frozenset  # goals and hit-count buckets this entry first reached
    found_at: int  # iteration of the entry's latest discovery


@dataclass
class Observation:
    """One input shape seen during fuzzing and how often it occurred."""
    types: tuple
    count: int = 1

    @property
    def inputs_consumed(self) -> int:
        return len(self.types)


@dataclass
class FuzzReport:
    tests: list = field(default_factory=list)
    goals_covered: set = field(default_factory=set)
    observations: list = field(default_factory=list)
    spent: float = 0.0
    iterations: int = 0
    corpus_size: int = 0

    @property
    def max_consumed(self) -> int:
        return max((o.inputs_consumed for o in self.observations), default=0)


def harvest_dictionary(ast: A.Ast) -> list:
    """Integer literals of the program and their negations, sorted."""
    seen: set = set()

    def from_expr(e) -> None:
        for x in A.walk_expr(e):
            if isinstance(x, A.IntLit):
                seen.add(x.value)

    def from_decl(d: A.Decl) -> None:
        if d.init is not None:
            from_expr(d.init)
        for v in d.array_init or ():
            seen.add(v if isinstance(v, int) else getattr(v, "value", 0))

    for d in ast.globals:
        from_decl(d)
    for fn in ast.functions:
        for s in A.walk_stmts(fn.body):
            if isinstance(s, A.Decl):
                from_decl(s)
                continue
            for e in A.stmt_exprs(s):
                from_expr(e)
            if isinstance(s, A.Switch):
                for sec in s.sections:
                    seen.update(v for v in sec.labels if v is not None)
    return sorted(seen | {-v for v in seen})


def _boundary(t: TypeDesc, which: str) -> int:
    if which == "zero":
        return 0
    if which == "one":
        return 1
    if which == "minus-one":
        return t.wrap(-1)
    if which == "min":
        return t.min
    return t.max


def random_value(t: TypeDesc, dictionary: Sequence[int], rng: random.Random) -> int:
    r = rng.random()
    if dictionary and r < 0.3:
        return t.wrap(rng.choice(dictionary))
    if r < 0.6:
        return _boundary(t, rng.choice(("zero", "one", "minus-one", "min", "max")))
    return rng.randint(t.min, t.max)


def mutate(tape: Sequence, dictionary: Sequence[int], rng: random.Random,
           op: Optional[str] = None, other: Optional[Sequence] = None,
           default_type: TypeDesc = INT) -> tuple:
    """Apply one mutation operator to ``tape``.

    ``op`` is drawn from :data:`OPS` when not given. Operators that edit a
    value fall back to ``append`` on an empty tape, and ``dictionary`` falls
    back to a boundary value when the dictionary is empty.
    """
    tape = tuple(tape)
    if op is None:
        op = rng.choice(OPS)
    if op not in OPS:
        raise ValueError(f"unknown mutation {op!r}")
    if op in _NEEDS_VALUE and not tape:
        op = "append"
    if op == "dictionary" and not dictionary:
        op = "boundary-" + rng.choice(("zero", "one", "minus-one", "min", "max"))
    if op == "append":
        t = tape[-1][0] if tape else default_type
        return tape + ((t, rng.randint(t.min, t.max)),)
    if op == "truncate":
        return tape[:rng.randrange(len(tape))] if tape else tape
    if op == "splice":
        donor = tuple(other) if other else tape
        i = rng.randint(0, len(tape))
        j = rng.randint(0, len(donor))
        return tape[:i] + donor[j:]
    pos = rng.randrange(len(tape))
    t, v = tape[pos]
    if op == "bitflip":
        nv = v ^ (1 << rng.randrange(t.width))
    elif op == "delta":
        d = rng.randint(1, 16)
        nv = v + (d if rng.random() < 0.5 else -d)
    elif op == "dictionary":
        nv = rng.choice(dictionary)
    else:
        nv = _boundary(t, op[len("boundary-"):])
    return tape[:pos] + ((t, t.wrap(nv)),) + tape[pos + 1:]


def _bucket(n: int) -> int:
    if n <= 3:
        return n
    if n < 8:
        return 4
    if n < 16:
        return 8
    if n < 32:
        return 16
    if n < 128:
        return 32
    return 128


def _features(trace) -> set:
    feats = set(trace.goals_hit)
    counts = Counter((origin, arm if isinstance(arm, str) else arm[1])
                     for origin, arm, _ in trace.decisions)
    feats.update((key, _bucket(n)) for key, n in counts.items())
    return feats


class Fuzzer:
    """Mutational loop; one instance per run."""

    def __init__(self, prog: InstrumentedProgram, goal_table: GoalTable, seed: int = 0, *,
                 dictionary: Optional[Iterable[int]] = None, use_dictionary: bool = True,
                 step_limit: int = FUZZ_STEP_LIMIT):
        self.prog = prog
        self.table = goal_table
        self.rng = random.Random(seed)
        if dictionary is None:
            dictionary = harvest_dictionary(prog.ast) if use_dictionary else ()
        self.dictionary = sorted(set(dictionary))
        self.step_limit = step_limit
        self.corpus: list = []
        self.seen: set = set()
        self.report = FuzzReport()
        self._shapes: dict = {}
        self.it = 0

    def _extend(self, t: TypeDesc):
        if self._extended >= MAX_EXTENSION:
            return None
        self._extended += 1
        return (t, random_value(t, self.dictionary, self.rng))

    def _energy(self, e: CorpusEntry) -> float:
        return 1.0 + ENERGY_BOOST * 0.5 ** ((self.it - e.found_at) / ENERGY_HALF_LIFE)

    def _candidate(self) -> tuple:
        if not self.corpus:
            return ()
        parent_idx = self.rng.choices(range(len(self.corpus)),
                                      weights=[self._energy(e) for e in self.corpus])[0]
        self._parent = parent_idx
        tape = self.corpus[parent_idx].tape
        n = 1
        while n < 8 and self.rng.random() < 0.5:
            n += 1
        for _ in range(n):
            other = self.rng.choice(self.corpus).tape
            tape = mutate(tape, self.dictionary, self.rng, other=other)
        return tape

    def step(self) -> None:
        self._parent = None
        self._extended = 0
        tape = self._candidate()
        trace = execute(self.prog, tape, self.step_limit, on_exhaust=self._extend)
        consumed = tuple(zip(trace.input_types, trace.input_values))
        shape = tuple(trace.input_types)
        obs = self._shapes.get(shape)
        if obs is None:
            self._shapes[shape] = obs = Observation(shape, 0)
            self.report.observations.append(obs)
        obs.count += 1
        feats = _features(trace)
        new = feats - self.seen
        if new:
            self.seen |= new
            self.corpus.append(CorpusEntry(consumed, frozenset(new), self.it))
            if self._parent is not None:
                self.corpus[self._parent].found_at = self.it
        if self.table.would_credit(trace.goals_hit):
            test = self.table.offer(consumed, "fuzz")
            if test is not None:
                self.report.tests.append(test)
                self.report.goals_covered.update(test.goals)
        self.it += 1

    def run(self, budget: float, iterations: Optional[int] = None) -> FuzzReport:
        start = time.monotonic()
        if iterations is None and budget <= 0 or iterations is not None and iterations <= 0:
            return self.report
        deadline = start + budget
        while not self.table.done():
            if iterations is not None:
                if self.it >= iterations:
                    break
            elif time.monotonic() >= deadline:
                break
            self.step()
        self.report.spent = time.monotonic() - start
        self.report.iterations = self.it
        self.report.corpus_size = len(self.corpus)
        return self.report


def run_fuzzer(prog: InstrumentedProgram, goal_table: GoalTable, budget: float = 150.0,
               seed: int = 0, *, iterations: Optional[int] = None, **kw) -> FuzzReport:
    """Fuzz until ``budget`` seconds pass (or ``iterations`` runs, if given).

    In iteration mode the result depends only on the program, the seed and
    the table's starting state.
    """
    return Fuzzer(prog, goal_table, seed, **kw).run(budget, iterations)
