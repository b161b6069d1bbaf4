"""MiniC frontend: lexing, parsing, type checking and lowering."""
from __future__ import annotations

from . import ast
from .errors import Diagnostic, FrontendError
from .inttypes import TypeDesc
from .lower import lower_decisions
from .parser import parse_source
from .printer import to_source


def parse_program(source: str, arch: int = 32, *, entry: str = "main",
                  error_function: str = "reach_error", lower: bool = True) -> ast.Ast:
    """Parse, type-check and (by default) lower a MiniC program.

    Raises :class:`FrontendError` carrying the diagnostics on failure.
    """
    tree = parse_source(source, arch, entry, error_function)
    return lower_decisions(tree) if lower else tree


__all__ = ["Diagnostic", "FrontendError", "TypeDesc", "ast", "lower_decisions",
           "parse_program", "parse_source", "to_source"]
