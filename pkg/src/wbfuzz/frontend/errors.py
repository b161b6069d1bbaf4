from __future__ import annotations

from dataclasses import dataclass

SYNTAX_ERROR = "SyntaxError"
TYPE_ERROR = "TypeError"
UNSUPPORTED = "UnsupportedFeature"


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.code}: {self.message}"


class FrontendError(Exception):
    """Raised when a program cannot be turned into a typed AST."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

    @property
    def code(self) -> str:
        return self.diagnostics[0].code


def error(code: str, message: str, line: int = 0, column: int = 0) -> FrontendError:
    return FrontendError([Diagnostic("error", line, column, code, message)])
