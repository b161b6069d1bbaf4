"""Render a syntax tree back to MiniC source.

Expressions are fully parenthesised, so printing a parsed tree and parsing
the result again yields a structurally identical tree.
"""
from __future__ import annotations

from . import ast as A
from .inttypes import INT, TypeDesc


def _type(t: TypeDesc | None) -> str:
    return "void" if t is None else str(t)


def _literal(e: A.IntLit) -> str:
    t = e.type
    if e.value < 0:
        return f"(({t})({e.value & t.mask}ull))" if t.width == 64 else f"(({t})({e.value & t.mask}u))"
    if t == INT:
        return str(e.value)
    if t.width == 32 and not t.signed:
        return f"{e.value}u"
    if t.width == 64:
        return f"{e.value}ll" if t.signed else f"{e.value}ull"
    return f"(({t}){e.value})"


def expr(e) -> str:
    if isinstance(e, A.IntLit):
        return _literal(e)
    if isinstance(e, A.VarRef):
        return e.sym.name
    if isinstance(e, A.Index):
        return f"{e.sym.name}[{expr(e.index)}]"
    if isinstance(e, A.Unary):
        return f"({e.op}{expr(e.operand)})"
    if isinstance(e, (A.Binary, A.Logical)):
        return f"({expr(e.left)} {e.op} {expr(e.right)})"
    if isinstance(e, A.Cast):
        return f"(({_type(e.type)}){expr(e.operand)})"
    if isinstance(e, A.Conditional):
        return f"({expr(e.cond)} ? {expr(e.then)} : {expr(e.else_)})"
    if isinstance(e, A.AssignExpr):
        return f"({expr(e.target)} {e.op} {expr(e.value)})"
    if isinstance(e, A.IncDec):
        return f"({e.op}{expr(e.target)})" if e.prefix else f"({expr(e.target)}{e.op})"
    if isinstance(e, A.CallExpr):
        return f"{e.func}({', '.join(expr(a) for a in e.args)})"
    if isinstance(e, A.Nondet):
        return f"{e.name}()"
    raise TypeError(type(e).__name__)


class _Printer:
    def __init__(self, ast: A.Ast):
        self.ast = ast
        self.lines: list[str] = []
        self.depth = 0

    def emit(self, text: str) -> None:
        self.lines.append("    " * self.depth + text)

    def decl(self, d: A.Decl) -> str:
        sym = d.sym
        text = f"{_type(sym.type)} {sym.name}"
        if sym.is_array:
            text += f"[{sym.array_size}]"
            if d.array_init is not None:
                text += " = {" + ", ".join(str(v) for v in d.array_init) + "}"
        elif d.init is not None:
            text += f" = {expr(d.init)}"
        return text + ";"

    def block(self, b: A.Block) -> None:
        self.emit("{")
        self.depth += 1
        for s in b.stmts:
            self.stmt(s)
        self.depth -= 1
        self.emit("}")

    def sub(self, s) -> None:
        if isinstance(s, A.Block):
            self.block(s)
        else:
            self.depth += 1
            self.stmt(s)
            self.depth -= 1

    def stmt(self, s) -> None:
        if isinstance(s, A.Block):
            self.block(s)
        elif isinstance(s, A.Decl):
            self.emit(self.decl(s))
        elif isinstance(s, A.ExprStmt):
            self.emit(expr(s.expr) + ";")
        elif isinstance(s, A.Assign):
            self.emit(f"{expr(s.target)} = {expr(s.value)};")
        elif isinstance(s, A.If):
            self.emit(f"if ({expr(s.cond)})")
            self.sub(s.then)
            if s.else_ is not None:
                self.emit("else")
                self.sub(s.else_)
        elif isinstance(s, A.While):
            self.emit(f"while ({expr(s.cond)})")
            self.sub(s.body)
        elif isinstance(s, A.DoWhile):
            self.emit("do")
            self.sub(s.body)
            self.emit(f"while ({expr(s.cond)});")
        elif isinstance(s, A.For):
            init = ""
            if isinstance(s.init, A.Decl):
                init = self.decl(s.init)[:-1]
            elif isinstance(s.init, A.ExprStmt):
                init = expr(s.init.expr)
            elif s.init is not None:
                raise ValueError("cannot print multi-declaration for-init")
            cond = expr(s.cond) if s.cond is not None else ""
            step = expr(s.step) if s.step is not None else ""
            self.emit(f"for ({init}; {cond}; {step})")
            self.sub(s.body)
        elif isinstance(s, A.Loop):
            # display form only; not meant to be re-parsed
            self.emit("while (1) /* lowered loop */")
            self.emit("{")
            self.depth += 1
            if not s.do_while:
                self._loop_head(s)
            for st in s.body.stmts:
                self.stmt(st)
            for st in s.step:
                self.stmt(st)
            if s.do_while:
                self._loop_head(s)
            self.depth -= 1
            self.emit("}")
        elif isinstance(s, A.Switch):
            self.emit(f"switch ({expr(s.tag)})")
            self.emit("{")
            for sec in s.sections:
                for label in sec.labels:
                    self.emit("default:" if label is None else f"case {label}:")
                self.depth += 1
                for st in sec.body:
                    self.stmt(st)
                self.depth -= 1
            self.emit("}")
        elif isinstance(s, A.Break):
            self.emit("break;")
        elif isinstance(s, A.Continue):
            self.emit("continue;")
        elif isinstance(s, A.Return):
            self.emit("return;" if s.value is None else f"return {expr(s.value)};")
        elif isinstance(s, A.ErrorCall):
            self.emit(f"{self.ast.error_function}();")
        elif isinstance(s, A.Assume):
            self.emit(f"__VERIFIER_assume({expr(s.cond)});")
        elif isinstance(s, A.Abort):
            self.emit("abort();")
        elif isinstance(s, A.Exit):
            self.emit(f"exit({expr(s.code)});")
        else:
            raise TypeError(type(s).__name__)

    def _loop_head(self, s: A.Loop) -> None:
        for st in s.prelude:
            self.stmt(st)
        self.emit(f"if (!{expr(s.cond)}) break;")

    def program(self) -> str:
        for d in self.ast.globals:
            self.emit(self.decl(d))
        for f in self.ast.functions:
            self.emit(self.signature(f) + ";")
        for f in self.ast.functions:
            self.emit(self.signature(f))
            self.block(f.body)
        return "\n".join(self.lines) + "\n"

    @staticmethod
    def signature(f: A.FunctionDef) -> str:
        params = ", ".join(f"{_type(p.type)} {p.name}" for p in f.params) or "void"
        return f"{_type(f.ret_type)} {f.name}({params})"


def to_source(ast: A.Ast) -> str:
    return _Printer(ast).program()
