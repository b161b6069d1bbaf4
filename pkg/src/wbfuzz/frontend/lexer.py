from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SYNTAX_ERROR, error

KEYWORDS = {
    "int", "char", "short", "long", "unsigned", "signed", "_Bool", "bool", "void",
    "if", "else", "while", "do", "for", "switch", "case", "default", "break",
    "continue", "return", "extern", "static", "const", "volatile", "inline",
    "register", "auto", "float", "double", "struct", "union", "enum", "typedef",
    "goto", "sizeof", "__inline", "__inline__", "__restrict", "restrict",
}

PUNCTUATORS = [
    "<<=", ">>=", "...", "->", "++", "--", "&&", "||", "<=", ">=", "==", "!=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
    "+", "-", "*", "/", "%", "&", "|", "^", "~", "!", "<", ">", "=", "?", ":",
    ";", ",", "(", ")", "{", "}", "[", "]", ".",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<pp>\#[^\n]*)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
  | (?P<int>(?:0[xX][0-9a-fA-F]+|\d+)[uUlL]*)
  | (?P<char>'(?:\\.|[^\\'\n])+')
  | (?P<string>"(?:\\.|[^\\"\n])*")
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>"""
    + "|".join(re.escape(p) for p in PUNCTUATORS)
    + r""")
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34, "a": 7,
            "b": 8, "f": 12, "v": 11}


@dataclass(frozen=True)
class Token:
    kind: str  # id, kw, int, char, string, float, op, eof
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise error(SYNTAX_ERROR, f"unexpected character {source[pos]!r}",
                        line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "comment":
            nls = text.count("\n")
            if nls:
                line += nls
                line_start = pos + text.rfind("\n") + 1
        elif kind in ("ws", "pp"):
            pass
        else:
            if kind == "id" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def char_value(text: str) -> int:
    body = text[1:-1]
    if body.startswith("\\"):
        esc = body[1:]
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        if esc.startswith("x"):
            return int(esc[1:], 16)
        if esc.isdigit():
            return int(esc, 8)
        raise ValueError(text)
    if len(body) != 1:
        raise ValueError(text)
    return ord(body)
