"""Shared coverage ledger with replay-validated credit."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Optional

from .instrument import ERROR_CALL, InstrumentedProgram
from .interp import DEFAULT_STEP_LIMIT, Trace, execute


@dataclass
class TestCase:
    tape: tuple  # ((TypeDesc, value), ...)
    source: str
    goals: tuple  # goals first credited to this test
    covers_error: bool
    trace: Trace


class GoalTable:
    """Which goals are covered, and by which test.

    Credit is only granted after replaying the tape in the interpreter;
    covered goals never revert. All writes happen under one lock, so
    engines running in threads may offer tests concurrently.
    """

    def __init__(self, prog: InstrumentedProgram, tracked: Optional[Iterable[int]] = None,
                 step_limit: int = DEFAULT_STEP_LIMIT, stop_on_first: bool = False):
        self.prog = prog
        self.stop_on_first = stop_on_first
        self.tracked = set(tracked) if tracked is not None else {g.id for g in prog.goals}
        self.step_limit = step_limit
        self.covered: dict = {}  # goal -> index into tests
        self.tests: list = []
        self.unreachable: dict = {}  # goal -> bound k
        self._lock = threading.Lock()

    @classmethod
    def for_mode(cls, prog: InstrumentedProgram, **kw) -> "GoalTable":
        if prog.mode == "cover-error":
            kw.setdefault("stop_on_first", True)
            return cls(prog, [g.id for g in prog.goals if g.kind == ERROR_CALL], **kw)
        return cls(prog, **kw)

    def is_covered(self, goal: int) -> bool:
        return goal in self.covered

    def uncovered(self) -> list:
        return sorted(g for g in self.tracked if g not in self.covered)

    def all_covered(self) -> bool:
        return all(g in self.covered for g in self.tracked)

    def done(self) -> bool:
        """True once nothing is left to search for.

        With ``stop_on_first`` (cover-error) a single covered goal is enough.
        """
        if self.stop_on_first and self.covered:
            return True
        return self.all_covered()

    def offer(self, tape, source: str) -> Optional[TestCase]:
        """Replay ``tape``; record and return a test if it covers a new tracked goal."""
        tape = tuple(tape)
        replay = execute(self.prog, tape, self.step_limit)
        with self._lock:
            new = [g for g in replay.goals_hit if g in self.tracked and g not in self.covered]
            if not new:
                return None
            idx = len(self.tests)
            test = TestCase(tape, source, tuple(new), replay.error_reached, replay)
            self.tests.append(test)
            for g in new:
                self.covered[g] = idx
                self.unreachable.pop(g, None)
            return test

    def would_credit(self, goals_hit) -> bool:
        """Cheap pre-check before paying for a replay."""
        return any(g in self.tracked and g not in self.covered for g in goals_hit)

    def mark_unreachable(self, goal: int, k: int) -> None:
        with self._lock:
            if goal not in self.covered:
                self.unreachable[goal] = k

    @property
    def coverage(self) -> float:
        if not self.tracked:
            return 1.0
        return len([g for g in self.tracked if g in self.covered]) / len(self.tracked)
