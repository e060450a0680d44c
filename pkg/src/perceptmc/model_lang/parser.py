"""Lexer and recursive-descent parser for the DTMC model and property languages.

Grammar (models):
    model    : 'dtmc' (const | param)* module
    const    : 'const' 'int' NAME ('=' INT)? ';'
    param    : 'param' 'double' NAME '=' INT+ ';'
    module   : 'module' NAME decl* command* 'endmodule'
    decl     : NAME ':' '[' expr '..' expr ']' 'init' expr ';'
    command  : '[]' expr '->' update ('+' update)* ';'
    update   : (expr ':')? assigns
    assigns  : 'true' | assign ('&' assign)*
    assign   : '(' NAME '\\'' '=' expr ')'

Expressions use | & ! comparisons (= != < <= > >=) and arithmetic
(+ - * /, min/max calls, decimal and integer literals).  '//' comments run
to end of line.

Properties: `P=? [ F expr ]` or `P=? [ F<=K expr ]` with K an integer
literal or a constant name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DuplicateDeclaration, ModelSyntaxError, UndeclaredVariable
from .ast import (
    Binary,
    BoolLit,
    Call,
    Command,
    ConstDecl,
    DecLit,
    Expr,
    IntLit,
    ModelAst,
    ParamRow,
    PropertyAst,
    Unary,
    Update,
    Var,
    VarDecl,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<decimal>\d+\.\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\[\]|\.\.|->|<=|>=|!=|[=<>!&|+\-*/:;,'()\[\]?])
    """,
    re.VERBOSE,
)

KEYWORDS = {"dtmc", "const", "int", "double", "param", "module", "endmodule",
            "init", "true", "false", "min", "max"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'decimal' | 'name' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            raise ModelSyntaxError(line, col, "a token", source[pos])
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, len(source) - line_start + 1))
    return tokens


class _Stream:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def accept(self, text: str | None = None, kind: str | None = None) -> Token | None:
        tok = self.current
        if tok.kind == "eof" and kind != "eof":
            return None
        if text is not None and tok.text != text:
            return None
        if kind is not None and tok.kind != kind:
            return None
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str | None = None, kind: str | None = None,
               what: str | None = None) -> Token:
        tok = self.accept(text, kind)
        if tok is None:
            cur = self.current
            expected = what or (repr(text) if text is not None else kind)
            raise ModelSyntaxError(cur.line, cur.col, expected,
                                   cur.text if cur.kind != "eof" else "end of input")
        return tok

    def error(self, expected: str) -> ModelSyntaxError:
        cur = self.current
        return ModelSyntaxError(cur.line, cur.col, expected,
                                cur.text if cur.kind != "eof" else "end of input")


# --- expressions (precedence climbing) -----------------------------------------

_BINOPS = [
    {"|"},
    {"&"},
    {"=", "!=", "<", "<=", ">", ">="},
    {"+", "-"},
    {"*", "/"},
]
_COMPARISONS = {"=", "!=", "<", "<=", ">", ">="}


def _parse_binary(s: _Stream, level: int) -> Expr:
    if level == len(_BINOPS):
        return _parse_unary(s)
    ops = _BINOPS[level]
    left = _parse_binary(s, level + 1)
    while s.current.kind == "op" and s.current.text in ops:
        op = s.accept().text
        right = _parse_binary(s, level + 1)
        left = Binary(op, left, right)
        if op in _COMPARISONS:
            break  # comparisons are non-associative
    return left


def _parse_unary(s: _Stream) -> Expr:
    if s.accept("!"):
        return Unary("!", _parse_unary(s))
    if s.accept("-"):
        operand = _parse_unary(s)
        if isinstance(operand, IntLit):
            return IntLit(-operand.value)
        if isinstance(operand, DecLit):
            return DecLit("-" + operand.text)
        return Unary("-", operand)
    return _parse_atom(s)


def _parse_atom(s: _Stream) -> Expr:
    tok = s.accept(kind="int")
    if tok:
        return IntLit(int(tok.text))
    tok = s.accept(kind="decimal")
    if tok:
        return DecLit(tok.text)
    if s.accept("("):
        inner = _parse_binary(s, 0)
        s.expect(")")
        return inner
    tok = s.accept(kind="name")
    if tok:
        if tok.text in ("true", "false"):
            return BoolLit(tok.text == "true")
        if tok.text in ("min", "max"):
            s.expect("(")
            args = [_parse_binary(s, 0)]
            while s.accept(","):
                args.append(_parse_binary(s, 0))
            s.expect(")")
            if len(args) < 2:
                raise s.error(f"{tok.text} needs at least two arguments")
            return Call(tok.text, tuple(args))
        return Var(tok.text)
    raise s.error("an expression")


def parse_expression(text: str) -> Expr:
    s = _Stream(text)
    expr = _parse_binary(s, 0)
    s.expect(kind="eof", what="end of expression")
    return expr


# --- models ---------------------------------------------------------------------

def _parse_update(s: _Stream) -> Update:
    # Either `weight : assigns` or bare assigns with implicit weight 1.
    mark = s.pos
    weight: Expr = IntLit(1)
    try:
        expr = _parse_binary(s, 0)
        if s.accept(":"):
            weight = expr
        else:
            s.pos = mark
    except ModelSyntaxError:
        s.pos = mark
    if s.accept("true"):
        return Update(weight, ())
    assigns = [_parse_assign(s)]
    while True:
        mark = s.pos
        if s.accept("&") and s.current.text == "(":
            assigns.append(_parse_assign(s))
        else:
            s.pos = mark
            break
    return Update(weight, tuple(assigns))


def _parse_assign(s: _Stream) -> tuple[str, Expr]:
    s.expect("(")
    name = s.expect(kind="name").text
    s.expect("'")
    s.expect("=")
    expr = _parse_binary(s, 0)
    s.expect(")")
    return (name, expr)


def _parse_command(s: _Stream) -> Command:
    open_tok = s.expect("[]")
    guard = _parse_binary(s, 0)
    s.expect("->")
    updates = [_parse_update(s)]
    while s.accept("+"):
        updates.append(_parse_update(s))
    s.expect(";")
    return Command(guard=guard, updates=tuple(updates), line=open_tok.line)


def parse_model(text: str) -> ModelAst:
    s = _Stream(text)
    s.expect("dtmc", what="'dtmc'")
    constants: list[ConstDecl] = []
    params: list[ParamRow] = []
    seen: set[str] = set()
    while True:
        if s.accept("const"):
            s.expect("int")
            name = s.expect(kind="name").text
            value = None
            if s.accept("="):
                neg = bool(s.accept("-"))
                value = int(s.expect(kind="int").text)
                if neg:
                    value = -value
            s.expect(";")
            if name in seen:
                raise DuplicateDeclaration(f"constant {name!r} declared twice")
            seen.add(name)
            constants.append(ConstDecl(name, value))
        elif s.accept("param"):
            s.expect("double")
            prefix = s.expect(kind="name").text
            s.expect("=")
            counts = []
            while s.current.kind == "int":
                counts.append(int(s.accept().text))
            s.expect(";")
            if len(counts) < 2:
                raise s.error("at least two observation counts")
            if prefix in seen:
                raise DuplicateDeclaration(f"param row {prefix!r} declared twice")
            seen.add(prefix)
            params.append(ParamRow(prefix, tuple(counts)))
        else:
            break
    s.expect("module", what="'module'")
    module_name = s.expect(kind="name").text
    variables: list[VarDecl] = []
    commands: list[Command] = []
    while not s.accept("endmodule"):
        if s.current.text == "[]":
            commands.append(_parse_command(s))
        else:
            tok = s.expect(kind="name", what="a variable declaration or command")
            s.expect(":")
            s.expect("[")
            lo = _parse_binary(s, 0)
            s.expect("..")
            hi = _parse_binary(s, 0)
            s.expect("]")
            s.expect("init")
            init = _parse_binary(s, 0)
            s.expect(";")
            if tok.text in seen:
                raise DuplicateDeclaration(f"variable {tok.text!r} declared twice")
            seen.add(tok.text)
            variables.append(VarDecl(tok.text, lo, hi, init, line=tok.line))
    s.expect(kind="eof", what="end of model")
    ast = ModelAst(
        model_kind="dtmc",
        constants=tuple(constants),
        params=tuple(params),
        module_name=module_name,
        variables=tuple(variables),
        commands=tuple(commands),
    )
    _check_names(ast)
    return ast


def free_names(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Unary):
        return free_names(e.operand)
    if isinstance(e, Binary):
        return free_names(e.left) | free_names(e.right)
    if isinstance(e, Call):
        out: set[str] = set()
        for a in e.args:
            out |= free_names(a)
        return out
    return set()


def _check_names(ast: ModelAst) -> None:
    known = {c.name for c in ast.constants}
    for p in ast.params:
        known |= set(p.symbols)
    var_names = {v.name for v in ast.variables}
    known |= var_names
    for v in ast.variables:
        for e in (v.lo, v.hi, v.init):
            _require_known(free_names(e) - {v.name}, known, f"declaration of {v.name!r}")
    for c in ast.commands:
        _require_known(free_names(c.guard), known, f"command at line {c.line}")
        for u in c.updates:
            _require_known(free_names(u.weight), known, f"command at line {c.line}")
            for name, expr in u.assigns:
                if name not in var_names:
                    raise UndeclaredVariable(
                        f"command at line {c.line}: assignment to undeclared variable {name!r}"
                    )
                _require_known(free_names(expr), known, f"command at line {c.line}")


def _require_known(names: set[str], known: set[str], where: str) -> None:
    unknown = names - known
    if unknown:
        raise UndeclaredVariable(f"{where}: undeclared name(s) {sorted(unknown)}")


# --- properties ------------------------------------------------------------------

def parse_property(text: str) -> PropertyAst:
    s = _Stream(text)
    tok = s.expect(kind="name", what="'P'")
    if tok.text != "P":
        raise ModelSyntaxError(tok.line, tok.col, "'P'", tok.text)
    s.expect("=")
    s.expect("?")
    s.expect("[")
    f_tok = s.expect(kind="name", what="'F'")
    if f_tok.text != "F":
        raise ModelSyntaxError(f_tok.line, f_tok.col, "'F'", f_tok.text)
    kind = "unbounded"
    bound: int | str | None = None
    if s.accept("<="):
        kind = "bounded"
        tok = s.accept(kind="int")
        if tok:
            bound = int(tok.text)
        else:
            bound = s.expect(kind="name", what="a step bound").text
    target = _parse_binary(s, 0)
    s.expect("]")
    s.expect(kind="eof", what="end of property")
    return PropertyAst(kind=kind, target=target, bound=bound)


def parse_properties_file(text: str) -> list[PropertyAst]:
    """One property per line; '//' comments and blank lines are skipped."""
    props = []
    for line in text.splitlines():
        line = line.split("//", 1)[0].strip()
        if line:
            props.append(parse_property(line))
    return props
