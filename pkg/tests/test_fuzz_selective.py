import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import program, with_int_input
from progen import generate
from wbfuzz.frontend import parse_program
from wbfuzz.frontend.inttypes import CHAR, INT, SHORT, UCHAR
from wbfuzz.fuzz import OPS, Observation, harvest_dictionary, mutate, run_fuzzer
from wbfuzz.goaltable import GoalTable
from wbfuzz.instrument import COVER_BRANCHES, COVER_ERROR, inject_goals
from wbfuzz.interp import execute
from wbfuzz.selective import (BOUNDARY, OBSERVED, PROGRAM_LITERAL, SLACK, SOLVED_MODEL,
                              build_profile, draw_tape, generate_tests)

BOOL_PROG = ("extern _Bool __VERIFIER_nondet_bool(void);\nvoid reach_error() {}\n"
             "int main(){_Bool b = __VERIFIER_nondet_bool(); if (b) reach_error(); return 0;}")
MAGIC = "if (x == 1234567) reach_error();"


# ------------------------------------------------------------------- goal table


def test_goal_table_credits_only_after_replay():
    prog = with_int_input("if (x > 0) reach_error();")
    table = GoalTable.for_mode(prog)
    t = table.offer([(INT, 5)], "fuzz")
    assert t.goals == (0,) and t.covers_error
    assert table.offer([(INT, 9)], "bmc") is None  # goal 0 already credited
    assert table.offer([(INT, -1)], "bmc").goals == (1,)
    assert table.all_covered() and table.coverage == 1.0


def test_goal_table_cover_error_stops_on_first():
    prog = with_int_input("if (x > 0) reach_error();", COVER_ERROR)
    table = GoalTable.for_mode(prog)
    assert table.tracked == set(prog.error_goals)
    assert table.offer([-3], "fuzz") is None
    table.mark_unreachable(prog.error_goals[0], 3)
    table.offer([3], "fuzz")
    assert table.done() and not table.unreachable


# ------------------------------------------------------------------------ fuzz


def test_zero_budget_report():
    prog = program(BOOL_PROG)
    rep = run_fuzzer(prog, GoalTable.for_mode(prog), budget=0)
    assert rep.tests == [] and rep.spent == 0 and rep.iterations == 0


def test_bool_error_in_100_iterations():
    prog = program(BOOL_PROG, COVER_ERROR)
    table = GoalTable.for_mode(prog)
    rep = run_fuzzer(prog, table, seed=3, iterations=100)
    assert table.done() and rep.tests[0].covers_error


def test_dictionary_finds_magic_constant():
    prog = with_int_input(MAGIC, COVER_ERROR)
    assert 1234567 in harvest_dictionary(prog.ast)
    table = GoalTable.for_mode(prog)
    run_fuzzer(prog, table, seed=1, iterations=10_000)
    assert table.done()
    blind = GoalTable.for_mode(prog)
    run_fuzzer(prog, blind, seed=1, iterations=10_000, use_dictionary=False)
    assert not blind.done()


def test_mutation_examples():
    rng = random.Random(0)
    grown = mutate((), [], rng, "append")
    assert len(grown) == 1 and grown[0][0] == INT
    assert mutate(((INT, 0),), [], rng, "boundary-max") == ((INT, 2147483647),)
    assert mutate(((INT, 5),), [1234567], rng, "dictionary") == ((INT, 1234567),)
    assert mutate(((CHAR, 5),), [1000], rng, "dictionary") == ((CHAR, -24),)  # wrapped
    with pytest.raises(ValueError):
        mutate((), [], rng, "shuffle")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([CHAR, UCHAR, SHORT, INT]), st.integers()),
                max_size=6).map(lambda xs: tuple((t, t.wrap(v)) for t, v in xs)),
       st.sampled_from(OPS), st.integers(0, 2 ** 32))
def test_mutations_keep_values_in_range(tape, op, seed):
    out = mutate(tape, [7, -7, 300], random.Random(seed), op, other=tape[::-1])
    assert all(t.contains(v) for t, v in out)
    if op not in ("append", "truncate", "splice") and tape:
        assert len(out) == len(tape)
        assert [t for t, _ in out] == [t for t, _ in tape]


def test_fuzz_tests_replay_and_coverage_grows():
    prog = inject_goals(parse_program(generate(5, 40).source), COVER_BRANCHES)
    table = GoalTable.for_mode(prog)
    rep = run_fuzzer(prog, table, seed=2, iterations=400)
    seen = set()
    for t in rep.tests:
        hit = execute(prog, t.tape).goals_hit
        assert set(t.goals) <= set(hit) and not set(t.goals) & seen
        seen |= set(t.goals)
    assert seen == rep.goals_covered == set(table.covered)
    assert rep.observations and all(isinstance(o, Observation) for o in rep.observations)


def test_fuzz_seed_determinism():
    src = generate(8, 40).source

    def once():
        prog = inject_goals(parse_program(src), COVER_BRANCHES)
        rep = run_fuzzer(prog, GoalTable.for_mode(prog), seed=9, iterations=300)
        return ([t.tape for t in rep.tests], [(o.types, o.count) for o in rep.observations],
                rep.corpus_size)

    assert once() == once()


# ------------------------------------------------------------------- selective


def test_profile_from_observations():
    prof = build_profile([Observation((INT, INT, INT), 5)])
    assert prof.max_positions == 3 + SLACK == 7
    assert [p.type for p in prof.positions[:3]] == [INT, INT, INT]


def test_default_profile():
    prof = build_profile()
    assert prof.max_positions == 4
    for p in prof.positions:
        assert p.type == INT
        assert set(p.values()) == {0, 1, -1, INT.min, INT.max}
        assert p.tagged(BOUNDARY) == p.values()


def test_solved_model_value_joins_pool():
    prof = build_profile(bmc_hints={"tapes": [((INT, 1234567),)], "consumption": {0: 1}})
    assert 1234567 in prof.position(0).tagged(SOLVED_MODEL)
    assert 1234567 not in prof.position(1).values()


def test_literals_and_observed_tags():
    prog = with_int_input("if (x > 0) reach_error();")
    test = GoalTable.for_mode(prog).offer([(INT, 77)], "fuzz")
    prof = build_profile(dictionary=[300, -5], tests=[test])
    assert 300 in prof.position(0).tagged(PROGRAM_LITERAL)
    assert 77 in prof.position(0).tagged(OBSERVED)


def test_majority_type_wins():
    prof = build_profile([Observation((CHAR,), 3), Observation((SHORT,), 1)])
    assert prof.position(0).type == CHAR
    assert set(prof.position(0).types_seen) == {CHAR, SHORT, INT}


shapes = st.lists(st.sampled_from([CHAR, UCHAR, SHORT, INT]), max_size=5).map(tuple)


@settings(max_examples=150, deadline=None)
@given(st.lists(shapes, max_size=4), shapes, st.lists(st.integers(-300, 300), max_size=4))
def test_profile_monotonicity(obs, extra, lits):
    before = build_profile([Observation(s) for s in obs], dictionary=lits)
    after = build_profile([Observation(s) for s in obs + [extra]], dictionary=lits)
    assert after.max_positions >= before.max_positions
    for i, p in enumerate(before.positions):
        q = after.position(i)
        for v, tags in p.pool.items():
            assert v in q.pool and tags <= q.pool[v]


def test_selective_all_covered_emits_nothing():
    prog = with_int_input("if (x > 0) reach_error();")
    table = GoalTable.for_mode(prog)
    table.offer([1], "fuzz")
    table.offer([-1], "fuzz")
    rep = generate_tests(build_profile(), prog, table, iterations=50)
    assert rep.tests == [] and rep.trials == 0


def test_selective_zero_budget():
    prog = with_int_input(MAGIC)
    rep = generate_tests(build_profile(), prog, GoalTable.for_mode(prog), budget=0)
    assert rep.tests == [] and rep.trials == 0


def test_selective_hits_model_value():
    prog = with_int_input("if (x == 987654321) reach_error();", COVER_ERROR)
    prof = build_profile(bmc_hints={"tapes": [((INT, 987654321),)]})
    table = GoalTable.for_mode(prog)
    rep = generate_tests(prof, prog, table, seed=4, iterations=10_000)
    assert table.done() and rep.tests[0].covers_error
    # every drawn tape fits the profile
    rng = random.Random(0)
    for _ in range(100):
        tape = draw_tape(prof, rng)
        assert len(tape) <= prof.max_positions


def test_selective_tests_replay():
    prog = inject_goals(parse_program(generate(12, 40).source), COVER_BRANCHES)
    table = GoalTable.for_mode(prog)
    rep = generate_tests(build_profile(dictionary=harvest_dictionary(prog.ast)), prog, table,
                         seed=1, iterations=500)
    for t in rep.tests:
        assert set(t.goals) <= set(execute(prog, t.tape).goals_hit)
        assert t.source == "selective"
