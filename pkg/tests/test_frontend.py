import glob
import os
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CORPUS
from helpers import INT_DECL
from progen import generate
from wbfuzz.frontend import FrontendError, parse_program, to_source
from wbfuzz.frontend import ast as A
from wbfuzz.frontend.errors import SYNTAX_ERROR, UNSUPPORTED
from wbfuzz.frontend.inttypes import (CHAR, INT, SHORT, UCHAR, UINT, USHORT, common_type,
                                      long_type, promote)
from wbfuzz.instrument import COVER_BRANCHES, inject_goals
from wbfuzz.interp import execute


def stmts_of(tree, fn="main"):
    return [s for s in A.walk_stmts(tree.function(fn).body)]


def test_minimal_program():
    tree = parse_program("int main(){return 0;}")
    assert [f.name for f in tree.functions] == ["main"]
    assert inject_goals(tree, COVER_BRANCHES).goal_count == 0


def test_canonical_benchmark_shape():
    tree = parse_program(INT_DECL + "int main(){int x = __VERIFIER_nondet_int(); "
                                    "if (x > 0) reach_error(); return 0;}", lower=False)
    body = stmts_of(tree)
    assert sum(isinstance(s, A.ErrorCall) for s in body) == 1
    nondets = [e for s in body for top in A.stmt_exprs(s) for e in A.walk_expr(top)
               if isinstance(e, A.Nondet)]
    assert len(nondets) == 1


@pytest.mark.parametrize("src, what", [
    ("int main(){int *p; return *p;}", "pointer"),
    ("int main(){float f = 1; return 0;}", "floating"),
    ("int f(int n){return n ? f(n - 1) : 0;} int main(){return f(3);}", "recurs"),
])
def test_unsupported_features(src, what):
    with pytest.raises(FrontendError) as ei:
        parse_program(src)
    assert ei.value.code == UNSUPPORTED
    assert what in str(ei.value)


def test_syntax_error_has_position():
    with pytest.raises(FrontendError) as ei:
        parse_program("int main() { return 0 }")
    d = ei.value.diagnostics[0]
    assert d.code == SYNTAX_ERROR and d.line == 1 and d.column > 0


def test_logical_and_lowers_to_nested_ifs():
    tree = parse_program("int main(){int a = 1; int b = 0; int x; x = (a && b); return x;}")
    body = stmts_of(tree)
    ifs = [s for s in body if isinstance(s, A.If)]
    assert len(ifs) == 2  # outer test of a, inner test of b
    assert not any(isinstance(e, A.Logical) for s in body for top in A.stmt_exprs(s)
                   for e in A.walk_expr(top))


def test_conditional_lowers_to_if_else():
    tree = parse_program("int main(){int c = 1; int y; y = c ? 1 : 2; return y;}")
    ifs = [s for s in stmts_of(tree) if isinstance(s, A.If)]
    assert len(ifs) == 1 and ifs[0].else_ is not None


def test_for_lowers_to_loop_with_step_at_end():
    tree = parse_program("int main(){int i; int s = 0; for(i=0;i<4;i++) s+=i; return s;}")
    loops = [s for s in stmts_of(tree) if isinstance(s, A.Loop)]
    assert len(loops) == 1
    assert execute(inject_goals(tree)).exit_code == 6


def corpus_sources():
    for path in sorted(glob.glob(os.path.join(CORPUS, "*.c"))):
        with open(path) as fh:
            yield os.path.basename(path), fh.read()


@pytest.mark.parametrize("name, src", list(corpus_sources()))
def test_print_parse_fixpoint_corpus(name, src):
    tree = parse_program(src, lower=False)
    assert parse_program(to_source(tree), lower=False) == tree


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_print_parse_fixpoint_generated(seed):
    tree = parse_program(generate(seed, 40).source, lower=False)
    assert parse_program(to_source(tree), lower=False) == tree


def test_lowering_preserves_semantics():
    rng = random.Random(11)
    for seed in range(200):
        src = generate(seed, 40).source
        prog = inject_goals(parse_program(src), COVER_BRANCHES)
        plain = prog.with_ast(parse_program(src, lower=False))
        for _ in range(3):
            tape = [rng.randint(-2 ** 31, 2 ** 31 - 1) for _ in range(4)]
            a, b = execute(prog, tape), execute(plain, tape)
            assert (a.status, a.exit_code, a.goals_hit, a.inputs_consumed) == \
                   (b.status, b.exit_code, b.goals_hit, b.inputs_consumed), (seed, tape)


@pytest.mark.parametrize("a, b, expected", [
    (CHAR, CHAR, INT), (UCHAR, SHORT, INT), (USHORT, USHORT, INT), (INT, UINT, UINT),
    (SHORT, UINT, UINT), (INT, INT, INT), (UCHAR, UINT, UINT),
])
def test_usual_arithmetic_conversions(a, b, expected):
    assert common_type(a, b) == expected


def test_promotions_and_long():
    assert promote(CHAR) == INT and promote(USHORT) == INT and promote(UINT) == UINT
    assert long_type(32).width == 32 and long_type(64).width == 64


@pytest.mark.parametrize("expr, expected", [
    ("2147483647 + 1", -2147483648),
    ("(unsigned char)300", 44),
    ("(char)200", -56),
    ("-1 < 1u", 0),  # -1 converts to UINT_MAX
    ("(unsigned char)255 + 1", 256),  # promoted to int first
    ("-7 / 2", -3),
    ("-7 % 2", -1),
    ("1 << 31", -2147483648),
    ("-8 >> 1", -4),
])
def test_expression_semantics(expr, expected):
    prog = inject_goals(parse_program(f"int main(){{ return {expr}; }}"))
    assert execute(prog).exit_code == expected
