import pytest
from hypothesis import given, settings, strategies as st

from helpers import INT_DECL, program, with_int_input
from progen import generate
from wbfuzz.frontend import ast as A
from wbfuzz.frontend import parse_program
from wbfuzz.frontend.inttypes import BOOL, CHAR, INT
from wbfuzz.instrument import COVER_BRANCHES, COVER_ERROR, ERROR_CALL, inject_goals
from wbfuzz.interp import (ABORTED, EXITED, STEP_LIMIT, TAPE_EXHAUSTED, TRAP,
                           BudgetExceeded, count_reachable_goals_exhaustive, execute)

# ------------------------------------------------------------------ instrument


def test_straight_line_cfg():
    prog = program("int main(){int x = 1; x = x + 1; return x;}")
    cfg = prog.cfgs["main"]
    assert len(cfg.blocks) == 1 and not cfg.decision_blocks()
    assert prog.goal_count == 0


def test_if_else_diamond():
    prog = program("int main(){int x = 1; if (x) x = 2; else x = 3; return x;}")
    cfg = prog.cfgs["main"]
    assert len(cfg.blocks) == 4
    assert sum(len(v) for v in cfg.decision_blocks().values()) == 2


def test_while_has_enter_and_exit_edges():
    prog = program("int main(){int i = 0; while (i < 3) i++; return i;}")
    edges = [e for v in prog.cfgs["main"].decision_blocks().values() for e in v]
    assert sorted(e.role[1] for e in edges) == ["enter", "exit"]


def test_if_else_goal_numbering():
    prog = program("int main(){int x = 1; if (x) x = 2; else x = 3; return x;}")
    assert [(g.name, g.kind) for g in prog.goals] == [("GOAL-0", "then-edge"),
                                                       ("GOAL-1", "else-edge")]


def test_sequential_ifs_numbered_in_source_order():
    prog = program("int main(){int x = 1; if (x) x = 2; if (x > 1) x = 3; return x;}")
    assert [g.id for g in prog.goals] == [0, 1, 2, 3]
    assert prog.goals[0].line == prog.goals[2].line and prog.goals[0].col < prog.goals[2].col


def test_error_goals_numbered_last_in_cover_error():
    prog = with_int_input("if (x > 0) reach_error(); if (x == 3) x = 1;", COVER_ERROR)
    assert [g.kind for g in prog.goals][-1] == ERROR_CALL
    assert prog.error_goals == [prog.goal_count - 1]
    assert not program(INT_DECL + "int main(){reach_error(); return 0;}").error_goals


def test_branchless_program_has_no_goals():
    assert program("int main(){return 0;}").goal_count == 0


def count_decisions(tree) -> int:
    n = 0
    for f in tree.functions:
        for s in A.walk_stmts(f.body):
            if isinstance(s, (A.If, A.Loop)):
                n += 2
            elif isinstance(s, A.Switch):
                n += len(s.sections) + (0 if s.has_default else 1)
    return n


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_goal_count_matches_independent_walk(seed):
    src = generate(seed, 40).source
    tree = parse_program(src)
    prog = inject_goals(tree, COVER_BRANCHES)
    assert prog.goal_count == count_decisions(tree)
    assert [g.id for g in prog.goals] == list(range(prog.goal_count))
    again = inject_goals(parse_program(src), COVER_BRANCHES)
    assert again.goals == prog.goals


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(st.integers(-2 ** 31, 2 ** 31 - 1), max_size=5))
def test_instrumentation_mode_does_not_change_semantics(seed, tape):
    src = generate(seed, 40).source
    a = execute(inject_goals(parse_program(src), COVER_BRANCHES), tape)
    b = execute(inject_goals(parse_program(src), COVER_ERROR), tape)
    assert (a.status, a.exit_code, a.inputs_consumed) == (b.status, b.exit_code, b.inputs_consumed)


# ---------------------------------------------------------------------- interp

ERR_PROG = "if (x > 0) reach_error();"


def test_positive_input_reaches_error():
    prog = with_int_input(ERR_PROG)
    tr = execute(prog, [(INT, 5)])
    assert tr.goals_hit == [0] and tr.error_reached and tr.inputs_consumed == 1


def test_negative_input_takes_else():
    tr = execute(with_int_input(ERR_PROG), [(INT, -5)])
    assert tr.goals_hit == [1] and not tr.error_reached and tr.status == EXITED


def test_empty_tape_exhausts():
    tr = execute(with_int_input(ERR_PROG), [])
    assert tr.status == TAPE_EXHAUSTED and tr.inputs_consumed == 0 and tr.requested_type == INT


def test_tape_values_truncate_to_requested_type():
    prog = program("extern char __VERIFIER_nondet_char(void);\n"
                   "int main(){char c = __VERIFIER_nondet_char(); return c;}")
    assert execute(prog, [(INT, 300)]).exit_code == 44
    assert execute(prog, [200]).exit_code == -56


@pytest.mark.parametrize("body, status, code", [
    ("int z = 0; return 1 / z;", TRAP, None),
    ("int z = 0; return 1 % z;", TRAP, None),
    ("int y; return y;", EXITED, 0),
    ("__VERIFIER_assume(0); return 5;", EXITED, 0),
    ("abort(); return 5;", ABORTED, None),
    ("while (1) { } return 0;", STEP_LIMIT, None),
    ("int s = 40; return 1 << s;", EXITED, 0),
    ("int s = 40; return -8 >> s;", EXITED, -1),
    ("int a[2]; a[1] = 7; return a[1] + a[0];", EXITED, 7),
])
def test_semantic_corner_cases(body, status, code):
    src = ("extern void __VERIFIER_assume(int);\nextern void abort(void);\n"
           f"int main(){{ {body} }}")
    tr = execute(program(src), step_limit=10_000)
    assert tr.status == status and tr.exit_code == code


def test_out_of_bounds_index_traps():
    tr = execute(with_int_input("int a[4]; a[x] = 1;"), [9])
    assert tr.status == TRAP


def test_oracle_bool_both_arms():
    prog = program("extern _Bool __VERIFIER_nondet_bool(void);\n"
                   "int main(){_Bool b = __VERIFIER_nondet_bool(); int r; "
                   "if (b) r = 1; else r = 2; return r;}")
    assert count_reachable_goals_exhaustive(prog) == {0, 1}


def test_oracle_contradiction_unreachable():
    prog = program("extern char __VERIFIER_nondet_char(void);\n"
                   "int main(){char x = __VERIFIER_nondet_char(); "
                   "if (x == 3 && x == 4) return 1; return 0;}")
    # lowered: x == 3 gives goals 0/1, x == 4 gives 2/3, the test of the
    # temporary holding the conjunction gives 4/5
    reached = count_reachable_goals_exhaustive(prog)
    assert reached == {0, 1, 3, 5}
    brute = set()
    for v in range(-128, 128):
        brute.update(execute(prog, [(CHAR, v)]).goals_hit)
    assert brute == reached


def test_oracle_branchless_and_budget():
    assert count_reachable_goals_exhaustive(program("int main(){return 0;}")) == set()
    with pytest.raises(BudgetExceeded):
        count_reachable_goals_exhaustive(with_int_input(ERR_PROG))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(st.integers(-2 ** 31, 2 ** 31 - 1), max_size=6),
       st.integers(-2 ** 31, 2 ** 31 - 1))
def test_determinism_and_prefix_monotonicity(seed, tape, extra):
    prog = inject_goals(parse_program(generate(seed, 40).source), COVER_BRANCHES)
    a, b = execute(prog, tape), execute(prog, tape)
    assert a == b
    longer = execute(prog, tape + [extra])
    if a.status != TAPE_EXHAUSTED:
        assert longer == a
    else:
        assert longer.goals_hit[:len(a.goals_hit)] == a.goals_hit
        assert longer.input_values[:a.inputs_consumed] == a.input_values


def test_input_marks_interleave_decisions():
    prog = with_int_input("int y = __VERIFIER_nondet_int(); if (x) y = 1; "
                          "if (y > 3) reach_error();")
    tr = execute(prog, [0, 9])
    assert tr.input_marks == [0, 0] and tr.error_reached
    assert tr.input_types == [INT, INT] and tr.input_values == [0, 9]


def test_bool_inputs_normalise():
    prog = program("extern _Bool __VERIFIER_nondet_bool(void);\n"
                   "int main(){_Bool b = __VERIFIER_nondet_bool(); return b;}")
    assert execute(prog, [(BOOL, 1)]).exit_code == 1
    assert execute(prog, [2]).exit_code == 0  # modular truncation to one bit
