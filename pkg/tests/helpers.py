"""Small builders shared by the unit tests."""
from wbfuzz.frontend import parse_program
from wbfuzz.instrument import COVER_BRANCHES, inject_goals

INT_DECL = "extern int __VERIFIER_nondet_int(void);\nvoid reach_error() {}\n"


def program(source: str, mode: str = COVER_BRANCHES, arch: int = 32):
    return inject_goals(parse_program(source, arch), mode)


def with_int_input(body: str, mode: str = COVER_BRANCHES):
    """``main`` reading one int into ``x`` before ``body``."""
    return program(INT_DECL + "int main() { int x = __VERIFIER_nondet_int(); " + body
                   + " return 0; }", mode)
