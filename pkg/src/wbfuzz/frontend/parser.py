"""Recursive-descent parser and type checker for MiniC.

The parser resolves every identifier to a :class:`Symbol` and types every
expression as it builds it, so the returned tree is complete and immutable.
Constructs outside the subset (pointers, floats, structs, goto, recursion,
dynamic allocation) are rejected with an ``UnsupportedFeature`` diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import ast as A
from . import build as B
from .errors import SYNTAX_ERROR, TYPE_ERROR, UNSUPPORTED, FrontendError, error
from .inttypes import (BOOL, CHAR, INT, LONGLONG, SHORT, UCHAR, UINT, ULONGLONG, USHORT,
                       TypeDesc, long_type, nondet_types, promote, ulong_type)
from .lexer import Token, char_value, tokenize

_TYPE_WORDS = {"int", "char", "short", "long", "unsigned", "signed", "_Bool", "bool", "void"}
_QUALIFIERS = {"const", "volatile", "static", "extern", "register", "auto", "inline",
               "__inline", "__inline__", "restrict", "__restrict"}
_UNSUPPORTED_TYPES = {"float": "floating point", "double": "floating point",
                      "struct": "struct", "union": "union", "enum": "enum",
                      "typedef": "typedef"}
_ALLOCATORS = {"malloc", "calloc", "realloc", "free", "alloca"}
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "|=", "^="}
_BINARY_PRECEDENCE = [
    ("|",), ("^",), ("&",), ("==", "!="), ("<", ">", "<=", ">="), ("<<", ">>"),
    ("+", "-"), ("*", "/", "%"),
]

MAX_ARRAY_SIZE = 1 << 16


@dataclass
class _FuncSig:
    ret_type: Optional[TypeDesc]
    params: Optional[list]  # None when the prototype could not be parsed
    defined: bool = False
    loc: A.Loc = A.NOLOC
    unsupported: Optional[str] = None


@dataclass
class _FunctionState:
    name: str
    ret_type: Optional[TypeDesc]
    scopes: list = field(default_factory=list)
    slots: int = 0
    loops: int = 0
    switches: int = 0


class Parser:
    def __init__(self, source: str, arch: int = 32, error_function: str = "reach_error"):
        if arch not in (32, 64):
            raise ValueError("architecture must be 32 or 64")
        self.arch = arch
        self.error_function = error_function
        self.nondet = nondet_types(arch)
        self.toks: list[Token] = tokenize(source)
        self.pos = 0
        self.nid = 0
        self.globals: dict[str, A.Symbol] = {}
        self.global_decls: list[A.Decl] = []
        self.sigs: dict[str, _FuncSig] = {}
        self.functions: list[A.FunctionDef] = []
        self.calls: dict[str, set] = {}
        self.fn: Optional[_FunctionState] = None

    # ----------------------------------------------------------- token utils

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def loc(self, tok: Token | None = None) -> A.Loc:
        tok = tok or self.tok
        return A.Loc(tok.line, tok.col)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(SYNTAX_ERROR, f"expected '{text}' but found {self.describe(self.tok)}")
        return self.advance()

    def expect_id(self) -> Token:
        if self.tok.kind != "id":
            self.fail(SYNTAX_ERROR, f"expected identifier but found {self.describe(self.tok)}")
        return self.advance()

    @staticmethod
    def describe(tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else f"'{tok.text}'"

    def fail(self, code: str, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise error(code, message, tok.line, tok.col)

    def new_nid(self) -> int:
        self.nid += 1
        return self.nid

    def skip_balanced(self, open_: str, close: str) -> None:
        depth = 0
        while True:
            tok = self.advance()
            if tok.kind == "eof":
                self.fail(SYNTAX_ERROR, f"unbalanced '{open_}'", tok)
            if tok.kind == "op" and tok.text == open_:
                depth += 1
            elif tok.kind == "op" and tok.text == close:
                depth -= 1
                if depth == 0:
                    return

    def skip_to_semicolon(self) -> None:
        depth = 0
        while True:
            tok = self.advance()
            if tok.kind == "eof":
                self.fail(SYNTAX_ERROR, "expected ';'", tok)
            if tok.kind == "op" and tok.text in "({[":
                depth += 1
            elif tok.kind == "op" and tok.text in ")}]":
                depth -= 1
            elif tok.kind == "op" and tok.text == ";" and depth <= 0:
                return

    # ---------------------------------------------------------------- types

    def at_type(self) -> bool:
        t = self.tok
        return t.kind == "kw" and (t.text in _TYPE_WORDS or t.text in _QUALIFIERS
                                   or t.text in _UNSUPPORTED_TYPES)

    def parse_type(self) -> Optional[TypeDesc]:
        """Parse declaration specifiers; returns None for void."""
        words: list[str] = []
        start = self.tok
        while self.tok.kind == "kw" and (self.tok.text in _TYPE_WORDS
                                         or self.tok.text in _QUALIFIERS
                                         or self.tok.text in _UNSUPPORTED_TYPES):
            tok = self.advance()
            if tok.text in _UNSUPPORTED_TYPES:
                self.fail(UNSUPPORTED, f"unsupported feature: {_UNSUPPORTED_TYPES[tok.text]}", tok)
            if tok.text not in _QUALIFIERS:
                words.append(tok.text)
        if not words:
            self.fail(SYNTAX_ERROR, f"expected type but found {self.describe(start)}", start)
        return self._type_from_words(words, start)

    def _type_from_words(self, words: list[str], tok: Token) -> Optional[TypeDesc]:
        unsigned = "unsigned" in words
        signed = "signed" in words
        if unsigned and signed:
            self.fail(TYPE_ERROR, "both signed and unsigned", tok)
        rest = [w for w in words if w not in ("unsigned", "signed")]
        longs = rest.count("long")
        others = sorted(w for w in rest if w != "long")
        if others == ["void"] and not (unsigned or signed or longs):
            return None
        if others in (["_Bool"], ["bool"]) and not (unsigned or signed or longs):
            return BOOL
        if others == ["char"] and not longs:
            return UCHAR if unsigned else CHAR
        if others in (["short"], ["int", "short"]) and not longs:
            return USHORT if unsigned else SHORT
        if others in ([], ["int"]):
            if longs == 0 and (others or unsigned or signed):
                return UINT if unsigned else INT
            if longs == 1:
                return ulong_type(self.arch) if unsigned else long_type(self.arch)
            if longs == 2:
                return ULONGLONG if unsigned else LONGLONG
        self.fail(TYPE_ERROR, f"invalid type '{' '.join(words)}'", tok)

    # ------------------------------------------------------------- top level

    def parse(self, entry: str = "main") -> A.Ast:
        while self.tok.kind != "eof":
            self.parse_external()
        for name, callees in self.calls.items():
            for callee in callees:
                sig = self.sigs[callee]
                if not sig.defined:
                    raise error(TYPE_ERROR, f"function '{callee}' is declared but never defined",
                                sig.loc.line, sig.loc.col)
        self._check_recursion()
        if entry not in {f.name for f in self.functions}:
            raise error(TYPE_ERROR, f"entry function '{entry}' is not defined")
        return A.Ast(functions=tuple(self.functions), globals=tuple(self.global_decls),
                     entry=entry, arch=self.arch, error_function=self.error_function,
                     lowered=False, global_count=len(self.global_decls))

    def _check_recursion(self) -> None:
        state: dict[str, int] = {}

        def visit(name: str, stack: list[str]) -> None:
            state[name] = 1
            for callee in sorted(self.calls.get(name, ())):
                if state.get(callee) == 1:
                    cycle = " -> ".join(stack[stack.index(callee):] + [callee]) \
                        if callee in stack else f"{name} -> {callee}"
                    sig = self.sigs[callee]
                    raise error(UNSUPPORTED, f"unsupported feature: recursion ({cycle})",
                                sig.loc.line, sig.loc.col)
                if state.get(callee) is None:
                    visit(callee, stack + [callee])
            state[name] = 2

        for f in self.functions:
            if f.name not in state:
                visit(f.name, [f.name])

    def _is_intrinsic(self, name: str) -> bool:
        return (name.startswith("__VERIFIER_") or name in ("abort", "exit", self.error_function)
                or name in _ALLOCATORS or name.startswith("__assert"))

    def parse_external(self) -> None:
        if self.at(";"):
            self.advance()
            return
        start = self.tok
        if not self.at_type():
            self.fail(SYNTAX_ERROR, f"expected declaration but found {self.describe(start)}")
        base = self.parse_type()
        pointer = False
        while self.at("*"):
            pointer = True
            self.advance()
        name_tok = self.expect_id()
        if self.at("("):
            self._parse_function(base, name_tok, pointer)
            return
        if pointer:
            self.fail(UNSUPPORTED, "unsupported feature: pointer declaration", name_tok)
        self._parse_declarators(base, name_tok, is_global=True)

    def _parse_function(self, ret: Optional[TypeDesc], name_tok: Token, pointer: bool) -> None:
        name = name_tok.text
        loc = self.loc(name_tok)
        if self._is_intrinsic(name):
            # Prototypes and stub definitions of intrinsics are ignored.
            self.skip_balanced("(", ")")
            while not self.at("{", ";"):
                if self.tok.kind == "eof":
                    self.fail(SYNTAX_ERROR, "unexpected end of input")
                self.advance()
            if self.at("{"):
                self.skip_balanced("{", "}")
            else:
                self.advance()
            return
        params_start = self.pos
        try:
            params = self._parse_params()
            unsupported = "unsupported feature: pointer return type" if pointer else None
        except FrontendError as exc:
            if exc.code != UNSUPPORTED:
                raise
            params, unsupported = None, exc.diagnostics[0].message
            self.pos = params_start
            self.skip_balanced("(", ")")
        sig = self.sigs.get(name)
        if sig is None:
            sig = _FuncSig(ret, params, loc=loc, unsupported=unsupported)
            self.sigs[name] = sig
        if self.at(";"):
            self.advance()
            return
        while self.tok.kind == "id" and self.tok.text == "__attribute__":
            self.advance()
            self.skip_balanced("(", ")")
        if not self.at("{"):
            self.fail(SYNTAX_ERROR, f"expected '{{' or ';' but found {self.describe(self.tok)}")
        if unsupported:
            self.fail(UNSUPPORTED, unsupported, name_tok)
        if sig.defined:
            self.fail(TYPE_ERROR, f"redefinition of function '{name}'", name_tok)
        if sig.params is not None and len(sig.params) != len(params):
            self.fail(TYPE_ERROR, f"conflicting declaration of '{name}'", name_tok)
        sig.ret_type, sig.params, sig.defined, sig.loc = ret, params, True, loc
        self.calls.setdefault(name, set())
        self.fn = _FunctionState(name, ret, scopes=[{}])
        symbols = []
        for ptype, pname in params:
            sym = A.Symbol(pname, ptype, False, self.fn.slots)
            self.fn.slots += 1
            if pname in self.fn.scopes[0]:
                self.fail(TYPE_ERROR, f"duplicate parameter '{pname}'", name_tok)
            self.fn.scopes[0][pname] = sym
            symbols.append(sym)
        body = self.parse_block(new_scope=True)
        self.functions.append(A.FunctionDef(name, ret, tuple(symbols), body, self.fn.slots, loc))
        self.fn = None

    def _parse_params(self) -> list:
        self.expect("(")
        params: list = []
        if self.at(")"):
            self.advance()
            return params
        if self.at("void") and self.peek().kind == "op" and self.peek().text == ")":
            self.advance()
            self.advance()
            return params
        while True:
            if self.at("..."):
                self.fail(UNSUPPORTED, "unsupported feature: varargs")
            tok = self.tok
            ptype = self.parse_type()
            if self.at("*"):
                self.fail(UNSUPPORTED, "unsupported feature: pointer parameter")
            if ptype is None:
                self.fail(TYPE_ERROR, "parameter of type void", tok)
            pname = self.expect_id().text if self.tok.kind == "id" else f"__p{len(params)}"
            if self.at("["):
                self.fail(UNSUPPORTED, "unsupported feature: pointer parameter (array)")
            params.append((ptype, pname))
            if self.at(","):
                self.advance()
                continue
            self.expect(")")
            return params

    def _parse_declarators(self, base: Optional[TypeDesc], name_tok: Token,
                           is_global: bool) -> list:
        decls = []
        while True:
            decls.append(self._parse_one_declarator(base, name_tok, is_global))
            if self.at(","):
                self.advance()
                if self.at("*"):
                    self.fail(UNSUPPORTED, "unsupported feature: pointer declaration")
                name_tok = self.expect_id()
                continue
            self.expect(";")
            return decls

    def _parse_one_declarator(self, base: Optional[TypeDesc], name_tok: Token,
                              is_global: bool) -> A.Decl:
        name = name_tok.text
        loc = self.loc(name_tok)
        if base is None:
            self.fail(TYPE_ERROR, f"variable '{name}' declared void", name_tok)
        size = None
        if self.at("["):
            self.advance()
            size_expr = self.parse_conditional()
            self.expect("]")
            size = B.const_eval(size_expr)
            if not 0 < size <= MAX_ARRAY_SIZE:
                self.fail(TYPE_ERROR, f"invalid array size {size}", name_tok)
            if self.at("["):
                self.fail(UNSUPPORTED, "unsupported feature: multi-dimensional array")
        if is_global:
            if name in self.globals or name in self.sigs:
                self.fail(TYPE_ERROR, f"redefinition of '{name}'", name_tok)
            sym = A.Symbol(name, base, True, len(self.global_decls), size)
        else:
            scope = self.fn.scopes[-1]
            if name in scope:
                self.fail(TYPE_ERROR, f"redefinition of '{name}'", name_tok)
            sym = A.Symbol(name, base, False, self.fn.slots, size)
            self.fn.slots += 1
        init = None
        array_init = None
        if self.at("="):
            self.advance()
            if size is not None:
                array_init = self._parse_array_init(base, size)
            else:
                init = B.cast(self.parse_assignment(), base)
                if is_global:
                    B.const_eval(init)
        # declare after the initializer: `int x = x;` sees the outer x
        if is_global:
            self.globals[name] = sym
            decl = A.Decl(sym, init, array_init, loc)
            self.global_decls.append(decl)
            return decl
        self.fn.scopes[-1][name] = sym
        return A.Decl(sym, init, array_init, loc)

    def _parse_array_init(self, elem: TypeDesc, size: int) -> tuple:
        self.expect("{")
        values = []
        while not self.at("}"):
            tok = self.tok
            values.append(elem.convert(B.const_eval(self.parse_assignment())))
            if len(values) > size:
                self.fail(TYPE_ERROR, "too many initializers", tok)
            if not self.at(","):
                break
            self.advance()
        self.expect("}")
        return tuple(values)

    # ------------------------------------------------------------ statements

    def push_scope(self) -> None:
        self.fn.scopes.append({})

    def pop_scope(self) -> None:
        self.fn.scopes.pop()

    def parse_block(self, new_scope: bool = True) -> A.Block:
        tok = self.expect("{")
        if new_scope:
            self.push_scope()
        stmts: list = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail(SYNTAX_ERROR, "expected '}' before end of input")
            stmts.extend(self.parse_block_item())
        self.advance()
        if new_scope:
            self.pop_scope()
        return A.Block(tuple(stmts), self.loc(tok))

    def parse_block_item(self) -> list:
        if self.at_type():
            base = self.parse_type()
            if self.at("*"):
                self.fail(UNSUPPORTED, "unsupported feature: pointer declaration")
            name_tok = self.expect_id()
            if self.at("("):
                self.fail(UNSUPPORTED, "unsupported feature: nested function declaration")
            return self._parse_declarators(base, name_tok, is_global=False)
        return [self.parse_statement()]

    def parse_sub_statement(self):
        """A statement in a position where C does not allow declarations."""
        if self.at_type():
            self.fail(SYNTAX_ERROR, "declaration is not allowed here")
        if self.at("{"):
            return self.parse_block()
        return self.parse_statement()

    def parse_statement(self):
        tok = self.tok
        loc = self.loc()
        if tok.kind == "kw":
            kw = tok.text
            if kw == "if":
                self.advance()
                self.expect("(")
                cond = self.parse_expression()
                self.expect(")")
                nid = self.new_nid()
                then = self.parse_sub_statement()
                else_ = None
                if self.at("else"):
                    self.advance()
                    else_ = self.parse_sub_statement()
                return A.If(cond, then, else_, (nid, "if"), loc)
            if kw == "while":
                self.advance()
                self.expect("(")
                cond = self.parse_expression()
                self.expect(")")
                nid = self.new_nid()
                body = self._loop_body()
                return A.While(cond, body, (nid, "loop"), loc)
            if kw == "do":
                self.advance()
                nid = self.new_nid()
                body = self._loop_body()
                self.expect("while")
                self.expect("(")
                cond = self.parse_expression()
                self.expect(")")
                self.expect(";")
                return A.DoWhile(body, cond, (nid, "loop"), loc)
            if kw == "for":
                return self._parse_for(loc)
            if kw == "switch":
                return self._parse_switch(loc)
            if kw == "break":
                self.advance()
                self.expect(";")
                if not (self.fn.loops or self.fn.switches):
                    self.fail(SYNTAX_ERROR, "break outside loop or switch", tok)
                return A.Break(loc)
            if kw == "continue":
                self.advance()
                self.expect(";")
                if not self.fn.loops:
                    self.fail(SYNTAX_ERROR, "continue outside loop", tok)
                return A.Continue(loc)
            if kw == "return":
                self.advance()
                value = None
                if not self.at(";"):
                    value = self.parse_expression()
                    if self.fn.ret_type is None:
                        self.fail(TYPE_ERROR, "void function returns a value", tok)
                    value = B.cast(value, self.fn.ret_type)
                self.expect(";")
                return A.Return(value, loc)
            if kw == "goto":
                self.fail(UNSUPPORTED, "unsupported feature: goto")
            if kw in ("case", "default"):
                self.fail(SYNTAX_ERROR, f"'{kw}' label outside the top level of a switch")
            if kw == "sizeof":
                self.fail(UNSUPPORTED, "unsupported feature: sizeof")
        if self.at("{"):
            return self.parse_block()
        if self.at(";"):
            self.advance()
            return A.Block((), loc)
        if tok.kind == "id" and self.peek().kind == "op" and self.peek().text == ":":
            self.fail(UNSUPPORTED, "unsupported feature: goto label")
        special = self._intrinsic_statement()
        if special is not None:
            return special
        expr = self.parse_expression()
        self.expect(";")
        return A.ExprStmt(expr, loc)

    def _intrinsic_statement(self):
        tok = self.tok
        if tok.kind != "id" or not (self.peek().kind == "op" and self.peek().text == "("):
            return None
        name = tok.text
        loc = self.loc()
        if name == self.error_function:
            self.advance()
            self.expect("(")
            self.expect(")")
            self.expect(";")
            return A.ErrorCall((self.new_nid(), "error"), loc)
        if name == "__VERIFIER_assume":
            self.advance()
            self.expect("(")
            cond = self.parse_expression()
            self.expect(")")
            self.expect(";")
            return A.Assume(cond, loc)
        if name == "abort":
            self.advance()
            self.expect("(")
            self.expect(")")
            self.expect(";")
            return A.Abort(loc)
        if name == "exit":
            self.advance()
            self.expect("(")
            code = B.cast(self.parse_expression(), INT)
            self.expect(")")
            self.expect(";")
            return A.Exit(code, loc)
        return None

    def _loop_body(self):
        self.fn.loops += 1
        saved = self.fn.switches
        self.fn.switches = 0
        try:
            return self.parse_sub_statement()
        finally:
            self.fn.loops -= 1
            self.fn.switches = saved

    def _parse_for(self, loc: A.Loc):
        self.advance()
        self.expect("(")
        self.push_scope()
        init = None
        if self.at(";"):
            self.advance()
        elif self.at_type():
            decls = self.parse_block_item()
            init = decls[0] if len(decls) == 1 else A.Block(tuple(decls), loc)
        else:
            e_loc = self.loc()
            init = A.ExprStmt(self.parse_expression(), e_loc)
            self.expect(";")
        cond = None if self.at(";") else self.parse_expression()
        self.expect(";")
        step = None if self.at(")") else self.parse_expression()
        self.expect(")")
        nid = self.new_nid()
        body = self._loop_body()
        self.pop_scope()
        return A.For(init, cond, step, body, (nid, "loop"), loc)

    def _parse_switch(self, loc: A.Loc):
        self.advance()
        self.expect("(")
        tag = self.parse_expression()
        self.expect(")")
        B._require_value(tag, loc)
        tag = B.cast(tag, promote(tag.type))
        nid = self.new_nid()
        self.expect("{")
        self.push_scope()
        self.fn.switches += 1
        sections = []
        seen: set = set()
        labels: list = []
        body: list = []
        sec_loc = loc
        while not self.at("}"):
            if self.at("case", "default"):
                if body:
                    sections.append(A.SwitchSection(tuple(labels), tuple(body), sec_loc))
                    labels, body = [], []
                if not labels:
                    sec_loc = self.loc()
                label_tok = self.advance()
                if label_tok.text == "case":
                    value = B.const_eval(B.cast(self.parse_conditional(), tag.type))
                else:
                    value = None
                if value in seen:
                    self.fail(TYPE_ERROR, "duplicate case label", label_tok)
                seen.add(value)
                labels.append(value)
                self.expect(":")
                continue
            if self.tok.kind == "eof":
                self.fail(SYNTAX_ERROR, "expected '}' before end of input")
            if not labels:
                self.fail(SYNTAX_ERROR, "statement before the first case label")
            body.extend(self.parse_block_item())
        self.advance()
        if labels:
            sections.append(A.SwitchSection(tuple(labels), tuple(body), sec_loc))
        self.fn.switches -= 1
        self.pop_scope()
        return A.Switch(tag, tuple(sections), (nid, "switch"), loc)

    # ----------------------------------------------------------- expressions

    def parse_expression(self):
        e = self.parse_assignment()
        if self.at(","):
            self.fail(UNSUPPORTED, "unsupported feature: comma operator")
        return e

    def parse_assignment(self):
        start = self.pos
        left = self.parse_conditional()
        if self.tok.kind == "op" and self.tok.text in _ASSIGN_OPS:
            op_tok = self.advance()
            if not isinstance(left, (A.VarRef, A.Index)):
                self.fail(TYPE_ERROR, "assignment to a non-lvalue", op_tok)
            value = self.parse_assignment()
            loc = self.loc(self.toks[start])
            if op_tok.text == "=":
                value = B.cast(value, left.type)
            else:
                B._require_value(value, loc)
                # type-check the implied binary operation now
                B.compound_value(op_tok.text, left, value, loc)
            return A.AssignExpr(op_tok.text, left, value, left.type, loc)
        return left

    def parse_conditional(self):
        cond = self.parse_logical_or()
        if self.at("?"):
            tok = self.advance()
            nid = self.new_nid()
            then = self.parse_expression()
            self.expect(":")
            else_ = self.parse_conditional()
            return B.conditional(cond, then, else_, nid, self.loc(tok))
        return cond

    def parse_logical_or(self):
        left = self.parse_logical_and()
        while self.at("||"):
            tok = self.advance()
            nid = self.new_nid()
            right = self.parse_logical_and()
            left = B.logical("||", left, right, nid, self.loc(tok))
        return left

    def parse_logical_and(self):
        left = self.parse_binary(0)
        while self.at("&&"):
            tok = self.advance()
            nid = self.new_nid()
            right = self.parse_binary(0)
            left = B.logical("&&", left, right, nid, self.loc(tok))
        return left

    def parse_binary(self, level: int):
        if level == len(_BINARY_PRECEDENCE):
            return self.parse_unary()
        ops = _BINARY_PRECEDENCE[level]
        left = self.parse_binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            tok = self.advance()
            right = self.parse_binary(level + 1)
            left = B.binary(tok.text, left, right, self.loc(tok))
        return left

    def parse_unary(self):
        tok = self.tok
        loc = self.loc()
        if tok.kind == "op":
            if tok.text in ("-", "~", "!"):
                self.advance()
                return B.unary(tok.text, self.parse_unary(), loc)
            if tok.text == "+":
                self.advance()
                operand = self.parse_unary()
                B._require_value(operand, loc)
                return B.cast(operand, promote(operand.type), loc)
            if tok.text in ("++", "--"):
                self.advance()
                target = self.parse_unary()
                self._check_lvalue(target, tok)
                return A.IncDec(tok.text, True, target, target.type, loc)
            if tok.text in ("*", "&"):
                self.fail(UNSUPPORTED, "unsupported feature: pointer "
                          + ("dereference" if tok.text == "*" else "address-of"))
            if tok.text == "(" and self._paren_starts_type():
                self.advance()
                t = self.parse_type()
                if self.at("*"):
                    self.fail(UNSUPPORTED, "unsupported feature: pointer cast")
                self.expect(")")
                operand = self.parse_unary()
                if t is None:
                    self.fail(UNSUPPORTED, "unsupported feature: cast to void", tok)
                return B.cast(operand, t, loc)
        if tok.kind == "kw" and tok.text == "sizeof":
            self.fail(UNSUPPORTED, "unsupported feature: sizeof")
        return self.parse_postfix()

    def _paren_starts_type(self) -> bool:
        nxt = self.peek()
        return nxt.kind == "kw" and (nxt.text in _TYPE_WORDS or nxt.text in _QUALIFIERS
                                     or nxt.text in _UNSUPPORTED_TYPES)

    def _check_lvalue(self, target, tok: Token) -> None:
        if not isinstance(target, (A.VarRef, A.Index)):
            self.fail(TYPE_ERROR, "operand is not an lvalue", tok)

    def parse_postfix(self):
        e = self.parse_primary()
        while self.at("++", "--", "[", "(", ".", "->"):
            tok = self.tok
            if tok.text in ("++", "--"):
                self.advance()
                self._check_lvalue(e, tok)
                e = A.IncDec(tok.text, False, e, e.type, e.loc)
            elif tok.text in (".", "->"):
                self.fail(UNSUPPORTED, "unsupported feature: struct member access")
            else:
                self.fail(SYNTAX_ERROR, f"unexpected '{tok.text}'")
        return e

    def lookup(self, name: str) -> Optional[A.Symbol]:
        if self.fn is not None:
            for scope in reversed(self.fn.scopes):
                if name in scope:
                    return scope[name]
        return self.globals.get(name)

    def parse_primary(self):
        tok = self.tok
        loc = self.loc()
        if tok.kind == "int":
            self.advance()
            return self._int_literal(tok)
        if tok.kind == "char":
            self.advance()
            return A.IntLit(char_value(tok.text), INT, loc)
        if tok.kind == "float":
            self.fail(UNSUPPORTED, "unsupported feature: floating point")
        if tok.kind == "string":
            self.fail(UNSUPPORTED, "unsupported feature: string literal (pointer)")
        if self.at("("):
            self.advance()
            e = self.parse_expression()
            self.expect(")")
            return e
        if tok.kind == "id":
            self.advance()
            name = tok.text
            if self.at("("):
                return self._parse_call(tok)
            sym = self.lookup(name)
            if sym is None:
                if name in self.sigs:
                    self.fail(UNSUPPORTED, "unsupported feature: function pointer", tok)
                self.fail(TYPE_ERROR, f"use of undeclared identifier '{name}'", tok)
            if sym.is_array:
                if not self.at("["):
                    self.fail(UNSUPPORTED, "unsupported feature: pointer (array used as a value)",
                              tok)
                self.advance()
                index = self.parse_expression()
                self.expect("]")
                B._require_value(index, loc)
                return A.Index(sym, index, sym.type, loc)
            if self.at("["):
                self.fail(TYPE_ERROR, f"'{name}' is not an array")
            return A.VarRef(sym, sym.type, loc)
        self.fail(SYNTAX_ERROR, f"unexpected {self.describe(tok)}")

    def _int_literal(self, tok: Token) -> A.IntLit:
        text = tok.text
        body = text.rstrip("uUlL")
        suffix = text[len(body):].lower()
        if suffix not in ("", "u", "l", "ul", "lu", "ll", "ull", "llu"):
            self.fail(SYNTAX_ERROR, f"invalid integer suffix in '{text}'", tok)
        if body.lower().startswith("0x"):
            value, decimal = int(body, 16), False
        elif len(body) > 1 and body.startswith("0"):
            try:
                value = int(body, 8)
            except ValueError:
                self.fail(SYNTAX_ERROR, f"invalid octal literal '{text}'", tok)
            decimal = False
        else:
            value, decimal = int(body), True
        unsigned = "u" in suffix
        longs = suffix.count("l")
        lng, ulng = long_type(self.arch), ulong_type(self.arch)
        candidates: list[TypeDesc] = []
        if longs == 0:
            candidates = [INT] if not unsigned else [UINT]
            if not unsigned and not decimal:
                candidates.append(UINT)
        if longs <= 1:
            candidates += [ulng] if unsigned else ([lng] if decimal else [lng, ulng])
        candidates += [ULONGLONG] if unsigned else ([LONGLONG] if decimal else [LONGLONG, ULONGLONG])
        for t in candidates:
            if t.contains(value):
                return A.IntLit(value, t, self.loc(tok))
        self.fail(TYPE_ERROR, f"integer literal '{text}' is too large", tok)

    def _parse_call(self, name_tok: Token):
        name = name_tok.text
        loc = self.loc(name_tok)
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.parse_assignment())
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        if name.startswith("__VERIFIER_nondet_"):
            suffix = name[len("__VERIFIER_nondet_"):]
            if suffix not in self.nondet:
                self.fail(UNSUPPORTED, f"unsupported feature: nondet type '{suffix}'", name_tok)
            if args:
                self.fail(TYPE_ERROR, f"'{name}' takes no arguments", name_tok)
            return A.Nondet(self.nondet[suffix], name, loc)
        if name in _ALLOCATORS:
            self.fail(UNSUPPORTED, f"unsupported feature: dynamic allocation ({name})", name_tok)
        if name in (self.error_function, "__VERIFIER_assume", "abort", "exit"):
            self.fail(TYPE_ERROR, f"'{name}' may only be called as a statement", name_tok)
        sig = self.sigs.get(name)
        if sig is None:
            self.fail(TYPE_ERROR, f"call to undeclared function '{name}'", name_tok)
        if sig.unsupported:
            self.fail(UNSUPPORTED, sig.unsupported, name_tok)
        if len(args) != len(sig.params):
            self.fail(TYPE_ERROR, f"'{name}' expects {len(sig.params)} arguments, got {len(args)}",
                      name_tok)
        typed = tuple(B.cast(a, pt, loc) for a, (pt, _) in zip(args, sig.params))
        if self.fn is not None:
            self.calls.setdefault(self.fn.name, set()).add(name)
        return A.CallExpr(name, typed, sig.ret_type, loc)


def parse_source(source: str, arch: int = 32, entry: str = "main",
                 error_function: str = "reach_error") -> A.Ast:
    """Parse and type-check without lowering."""
    return Parser(source, arch, error_function).parse(entry)
