import pytest
from hypothesis import given, settings, strategies as st

from helpers import INT_DECL, program, with_int_input
from progen import generate
from wbfuzz.bmc import (MODEL, UNREACHABLE, BmcConfig, Inlined, Unwound, constant_fold,
                        encode_ssa, run_incremental, slice_formula, solve_goal, unroll)
from wbfuzz.bmc.engine import encode_at
from wbfuzz.bmc.unroll import walk_loop_free
from wbfuzz.frontend import parse_program
from wbfuzz.frontend.inttypes import INT
from wbfuzz.goaltable import GoalTable
from wbfuzz.instrument import COVER_BRANCHES, COVER_ERROR, inject_goals
from wbfuzz.interp import count_reachable_goals_exhaustive, execute

# then-goal of the inner if needs the loop body to run 9 times (i == 8)
EIGHT = with_int_input("int i = 0; while (i < 20) { if (i == 8 && x == 2) reach_error(); i++; }",
                       COVER_ERROR)


def nodes(lf):
    return list(walk_loop_free(lf.body))


def test_unwound_loop_structure():
    lf = unroll(program("int main(){int i = 0; while (i < 3) i++; return i;}"), 3)
    loops = [s for s in nodes(lf) if isinstance(s, Unwound)]
    assert len(loops) == 1 and loops[0].k == 3 and not loops[0].do_while
    f = encode_ssa(lf)
    assert not f.cut_guards  # i < 3 is false after exactly three copies


def test_cut_guard_when_bound_too_small():
    f = encode_at(program("int main(){int i = 0; while (i < 3) i++; return i;}"), 2)
    assert f.cut_guards


def test_straight_line_unchanged_by_bound():
    prog = with_int_input("int y = x + 1; if (y > 3) reach_error();")
    assert not any(isinstance(s, (Unwound, Inlined)) for s in nodes(unroll(prog, 1)))
    assert unroll(prog, 1).body == unroll(prog, 9).body


def test_calls_are_inlined():
    prog = program(INT_DECL + "int inc(int a) { return a + 1; }\n"
                              "int main(){int x = __VERIFIER_nondet_int(); return inc(x);}")
    assert any(isinstance(s, Inlined) for s in nodes(unroll(prog, 1)))


def test_ssa_versions():
    f = encode_ssa(unroll(program("int main(){int x; x = 1; x = x + 1; return x;}"), 1),
                   simplify=False)
    xs = [(n, t) for n, t in f.defs if n.startswith("x#")]
    assert [n for n, _ in xs] == ["x#0", "x#1"]
    assert xs[-1][1].op == "add" and xs[-1][1].args[0] is xs[-2][1]


def test_join_is_select():
    f = encode_ssa(unroll(with_int_input("int y; if (x) y = 1; else y = 2;"), 1))
    phis = [t for n, t in f.defs if n.startswith("phi")]
    assert phis and phis[-1].op == "ite"


def test_nondet_symbol_position_zero():
    f = encode_ssa(unroll(with_int_input("if (x > 0) reach_error();"), 1))
    assert len(f.nondet) == 1 and f.nondet[0].index == 0 and f.nondet[0].type == INT


def test_constant_folding():
    prog = with_int_input("int y = (2 + 3) * x; if (0 != 0) y = 1; int z = 5; "
                          "if (z == 5) y = 2;")
    raw = encode_ssa(unroll(prog, 1), simplify=False)
    folded = constant_fold(raw)
    y0 = [t for n, t in folded.defs if n.startswith("y#")][0]
    assert y0.op == "mul" and {a.op for a in y0.args} == {"const", "sym"}
    assert 5 in [a.val for a in y0.args if a.op == "const"]
    assert 0 in folded.unsat_goals  # then-arm of 0 != 0
    assert folded.target(2) is folded.builder.true  # then-arm of z == 5
    v = solve_goal(folded, 2, prog)
    assert v.kind == MODEL


def test_slicing_drops_unrelated_definitions():
    prog = program(INT_DECL + "int main(){int a = __VERIFIER_nondet_int(); "
                              "int b = __VERIFIER_nondet_int(); int x = a + 1; int z = b * b; "
                              "if (x == 5) reach_error(); return z;}")
    f = encode_at(prog, 1)
    sliced = slice_formula(f, 0)
    names = [n for n, _ in sliced.defs]
    assert not any(n.startswith("z#") for n in names)
    assert [s.sliced for s in sliced.nondet] == [False, True]
    v = solve_goal(f, 0, prog)
    assert v.is_model and v.tape == ((INT, 4), (INT, 0))
    assert 0 in execute(prog, v.tape).goals_hit


def test_slicing_keeps_full_cone():
    prog = with_int_input("int y = x * 3; if (y == 9) reach_error();")
    f = encode_at(prog, 1)
    assert [n for n, _ in slice_formula(f, 0).defs] == [n for n, _ in f.defs]


def test_magic_constant_unique_model():
    prog = with_int_input("if (x == 1234567) reach_error();", COVER_ERROR)
    v = solve_goal(encode_at(prog, 1), prog.error_goals[0], prog)
    assert v.is_model and v.tape == ((INT, 1234567),) and v.trace.error_reached


def test_folded_false_needs_no_backend():
    prog = with_int_input("if (0) reach_error();", COVER_ERROR)

    def backend(*a, **k):
        raise AssertionError("backend should not be called")

    v = solve_goal(encode_at(prog, 1), prog.error_goals[0], prog, backend=backend)
    assert v.kind == UNREACHABLE


def test_two_input_sum_replays():
    prog = program(INT_DECL + "int main(){int a = __VERIFIER_nondet_int(); "
                              "int b = __VERIFIER_nondet_int(); if (a + b == 10) reach_error(); "
                              "return 0;}", COVER_ERROR)
    v = solve_goal(encode_at(prog, 1), prog.error_goals[0], prog)
    a, b = (val for _, val in v.tape)
    assert (a + b) % 2 ** 32 == 10 and v.trace.error_reached


def test_k_schedule_finds_deep_goal_at_eleven():
    table = GoalTable.for_mode(EIGHT)
    seen = []
    res = run_incremental(EIGHT, table, COVER_ERROR, BmcConfig(k_start=1, k_step=5), 60,
                          on_bound=lambda k, f: seen.append(k))
    assert seen == [1, 6, 11]
    assert [t.k for t in res.tests] == [11]
    assert table.done() and table.tests[0].covers_error


def test_goal_unsat_below_needed_bound():
    g = EIGHT.error_goals[0]
    assert solve_goal(encode_at(EIGHT, 6), g, EIGHT).kind == UNREACHABLE
    assert solve_goal(encode_at(EIGHT, 9), g, EIGHT).is_model


def test_straight_line_error_at_k1():
    prog = with_int_input("if (x > 0) reach_error();", COVER_ERROR)
    res = run_incremental(prog, GoalTable.for_mode(prog), COVER_ERROR, BmcConfig(), 30)
    assert res.bounds == [1] and res.tests[0].k == 1


def test_zero_budget():
    prog = with_int_input("if (x > 0) reach_error();", COVER_ERROR)
    table = GoalTable.for_mode(prog)
    res = run_incremental(prog, table, COVER_ERROR, BmcConfig(), 0)
    assert not res.tests and not res.bounds and not table.covered and not table.unreachable


def test_config_validation():
    assert BmcConfig().k_step == 5
    with pytest.raises(ValueError):
        BmcConfig(k_step=0)


def test_dump_cnf(tmp_path):
    prog = with_int_input("if (x > 0) reach_error();", COVER_ERROR)
    run_incremental(prog, GoalTable.for_mode(prog), COVER_ERROR,
                    BmcConfig(dump_cnf=str(tmp_path)), 30)
    files = list(tmp_path.glob("*.cnf"))
    assert files and files[0].read_text().splitlines()[1].startswith("p cnf ")


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6).map(lambda s: 2 * s))
def test_bmc_matches_oracle_on_small_programs(seed):
    g = generate(seed, 16)
    prog = inject_goals(parse_program(g.source), COVER_BRANCHES)
    oracle = count_reachable_goals_exhaustive(prog)
    table = GoalTable.for_mode(prog)
    res = run_incremental(prog, table, COVER_BRANCHES, BmcConfig(), 60)
    assert set(table.covered) == oracle
    if res.complete:
        assert not set(res.unreachable) & oracle
    for v in res.tests:  # every model replays to its goal
        assert v.goal in execute(prog, v.tape).goals_hit


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_slicing_and_folding_do_not_change_verdicts(seed):
    prog = inject_goals(parse_program(generate(seed, 40).source), COVER_BRANCHES)
    f_on, f_off = encode_at(prog, 5, True), encode_at(prog, 5, False)
    for goal in range(prog.goal_count):
        on = solve_goal(f_on, goal, prog, slicing=True)
        off = solve_goal(f_off, goal, prog, slicing=False)
        assert on.kind == off.kind, goal
        if on.is_model:
            assert goal in execute(prog, on.tape).goals_hit
