"""Profile-driven random testing for goals the other engines left open.

A profile says how many inputs a run tends to read, what type each
position has, and which values are worth trying there: type boundaries,
program literals, values from solver models and values seen in tests.
"""
from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .frontend.inttypes import INT, TypeDesc
from .goaltable import GoalTable
from .instrument import InstrumentedProgram
from .interp import execute

PROGRAM_LITERAL = "program-literal"
BOUNDARY = "boundary"
SOLVED_MODEL = "solved-model"
OBSERVED = "observed"

SLACK = 4
DEFAULT_TYPE = INT


@dataclass
class PositionProfile:
    type: TypeDesc
    types_seen: tuple  # every type considered for this position
    pool: dict  # value -> frozenset of source tags

    def values(self) -> list:
        return sorted(self.pool)

    def tagged(self, tag: str) -> list:
        return sorted(v for v, tags in self.pool.items() if tag in tags)


@dataclass
class InputProfile:
    max_positions: int
    positions: list = field(default_factory=list)  # PositionProfile per position

    def position(self, i: int) -> PositionProfile:
        return self.positions[i]


def _boundaries(t: TypeDesc) -> set:
    return {0, 1, t.wrap(-1), t.min, t.max}


def _shape(obs) -> tuple:
    """Per-position types of an observation, a trace or a test."""
    if hasattr(obs, "types"):
        return tuple(obs.types)
    if hasattr(obs, "input_types"):
        return tuple(obs.input_types)
    return tuple(t for t, _ in obs.tape)


def build_profile(observations: Iterable = (), bmc_hints: Optional[dict] = None,
                  dictionary: Iterable[int] = (), tests: Iterable = ()) -> InputProfile:
    """Learn an input profile from fuzzing observations, BMC hints and emitted tests.

    Pools only grow as evidence is added: boundaries and literals are
    taken for every type seen at a position (plus the default int).
    """
    hints = bmc_hints or {}
    type_counts: list = []
    consumption = [0]
    have_evidence = False

    def note(shape, weight: int) -> None:
        while len(type_counts) < len(shape):
            type_counts.append(Counter())
        for i, t in enumerate(shape):
            type_counts[i][t] += weight
        consumption.append(len(shape))

    for obs in observations:
        have_evidence = True
        note(_shape(obs), getattr(obs, "count", 1))
    tests = list(tests)
    for t in tests:
        have_evidence = True
        note(_shape(t), 1)
    model_tapes = list(hints.get("tapes", ()))
    for tape in model_tapes:
        have_evidence = True
        note(tuple(t for t, _ in tape), 1)
    for n in hints.get("consumption", {}).values():
        have_evidence = True
        consumption.append(n)
    max_positions = max(consumption) + SLACK if have_evidence else SLACK

    literals = sorted(set(dictionary))
    positions = []
    for i in range(max_positions):
        counts = type_counts[i] if i < len(type_counts) else Counter()
        if counts:
            # most frequent, ties broken by first appearance (Counter keeps insertion order)
            best = max(counts.values())
            chosen = next(t for t, c in counts.items() if c == best)
        else:
            chosen = DEFAULT_TYPE
        types_seen = tuple(sorted({DEFAULT_TYPE, *counts}, key=lambda t: (t.kind, t.width)))
        pool: dict = {}

        def add(v: int, tag: str) -> None:
            pool[v] = pool.get(v, frozenset()) | {tag}

        for t in types_seen:
            for v in _boundaries(t):
                add(v, BOUNDARY)
            for v in literals:
                if t.contains(v):
                    add(v, PROGRAM_LITERAL)
        for tape in model_tapes:
            if i < len(tape):
                add(tape[i][1], SOLVED_MODEL)
        for test in tests:
            if i < len(test.tape):
                add(test.tape[i][1], OBSERVED)
        positions.append(PositionProfile(chosen, types_seen, pool))
    return InputProfile(max_positions, positions)


@dataclass
class SelectiveReport:
    tests: list = field(default_factory=list)
    trials: int = 0
    spent: float = 0.0


def draw_tape(profile: InputProfile, rng: random.Random, pool_ratio: float = 0.5) -> tuple:
    n = rng.randint(0, profile.max_positions)
    tape = []
    for i in range(n):
        pos = profile.positions[i]
        t = pos.type
        if rng.random() < pool_ratio:
            v = t.wrap(rng.choice(pos.values()))
        else:
            v = rng.randint(t.min, t.max)
        tape.append((t, v))
    return tuple(tape)


def generate_tests(profile: InputProfile, prog: InstrumentedProgram, goal_table: GoalTable,
                   budget: float = 50.0, seed: int = 0, *, iterations: Optional[int] = None,
                   pool_ratio: float = 0.5, step_limit: Optional[int] = None) -> SelectiveReport:
    """Random trials shaped by ``profile``; keeps tests that first-hit an open goal.

    With ``iterations`` set the run is bounded by trial count only, which
    makes it deterministic for a given seed.
    """
    report = SelectiveReport()
    start = time.monotonic()
    if iterations is None and budget <= 0 or iterations is not None and iterations <= 0:
        return report
    if not 0.0 <= pool_ratio <= 1.0:
        raise ValueError("pool_ratio must lie in [0, 1]")
    rng = random.Random(seed)
    # the values list is sorted once per position rather than per draw
    frozen = InputProfile(profile.max_positions,
                          [_Frozen(p.type, p.values()) for p in profile.positions])
    limit = step_limit or goal_table.step_limit
    deadline = start + budget
    while not goal_table.done():
        if iterations is not None:
            if report.trials >= iterations:
                break
        elif time.monotonic() >= deadline:
            break
        tape = draw_tape(frozen, rng, pool_ratio)
        report.trials += 1
        trace = execute(prog, tape, limit, record_decisions=False)
        if goal_table.would_credit(trace.goals_hit):
            consumed = tuple(zip(trace.input_types, trace.input_values))
            test = goal_table.offer(consumed, "selective")
            if test is not None:
                report.tests.append(test)
    report.spent = time.monotonic() - start
    return report


class _Frozen:
    __slots__ = ("type", "_values")

    def __init__(self, t: TypeDesc, values: Sequence[int]):
        self.type = t
        self._values = list(values)

    def values(self) -> list:
        return self._values
