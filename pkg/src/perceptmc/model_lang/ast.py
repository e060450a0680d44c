"""AST node types for the DTMC model language, and rendering back to text.

Rendering is the inverse of parsing on the supported grammar:
parse_model(render_model(ast)) == ast for every ast the toolkit produces.
Source positions are carried for diagnostics but excluded from equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


# --- expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class DecLit:
    """A decimal literal such as 0.675, kept as written so it round-trips."""

    text: str

    @property
    def value(self) -> Fraction:
        return Fraction(self.text)


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # '!' or '-'
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of: | & = != < <= > >= + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str  # 'min' or 'max'
    args: tuple["Expr", ...]


Expr = IntLit | DecLit | BoolLit | Var | Unary | Binary | Call


# --- model structure -------------------------------------------------------------

@dataclass(frozen=True)
class ConstDecl:
    """`const int NAME = INT;` or symbolic `const int NAME;` (bound at expansion)."""

    name: str
    value: int | None = None


@dataclass(frozen=True)
class ParamRow:
    """`param double x = 4748 2139 148;` -- an estimated transition row.

    Declares symbols x1 .. x(n-1) for the first n-1 outcomes; the final
    outcome's probability is written explicitly as 1 minus the others.
    """

    prefix: str
    counts: tuple[int, ...]

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(f"{self.prefix}{j}" for j in range(1, len(self.counts)))


@dataclass(frozen=True)
class VarDecl:
    """`name : [lo..hi] init v;` -- bounds and init may reference constants."""

    name: str
    lo: Expr
    hi: Expr
    init: Expr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Update:
    """One weighted outcome of a command: `w : (x'=e) & (y'=f)`."""

    weight: Expr
    assigns: tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class Command:
    """`[] guard -> w1:(u1) + ... + wn:(un);`"""

    guard: Expr
    updates: tuple[Update, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModelAst:
    model_kind: str = "dtmc"
    constants: tuple[ConstDecl, ...] = ()
    params: tuple[ParamRow, ...] = ()
    module_name: str = "main"
    variables: tuple[VarDecl, ...] = ()
    commands: tuple[Command, ...] = ()

    def constant_map(self) -> dict[str, int | None]:
        return {c.name: c.value for c in self.constants}

    def variable(self, name: str) -> VarDecl:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class PropertyAst:
    """`P=? [ F target ]` (kind 'unbounded') or `P=? [ F<=k target ]` (kind 'bounded')."""

    kind: str
    target: Expr
    bound: int | str | None = None  # int literal or constant name for bounded reach


# --- rendering --------------------------------------------------------------------

# Higher binds tighter. '=' etc. are non-associative comparisons.
_PREC = {
    "|": 1,
    "&": 2,
    "=": 3, "!=": 3, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4,
    "*": 5, "/": 5,
}
_LEFT_ASSOC = {"|", "&", "+", "-", "*", "/"}


def render_expr(e: Expr) -> str:
    return _render(e, 0)


def _render(e: Expr, parent_prec: int) -> str:
    if isinstance(e, IntLit):
        s = str(e.value)
    elif isinstance(e, DecLit):
        s = e.text
    elif isinstance(e, BoolLit):
        s = "true" if e.value else "false"
    elif isinstance(e, Var):
        s = e.name
    elif isinstance(e, Call):
        s = f"{e.func}({', '.join(_render(a, 0) for a in e.args)})"
    elif isinstance(e, Unary):
        inner = _render(e.operand, 6)
        s = f"{e.op}{inner}"
        return f"({s})" if parent_prec > 6 else s
    elif isinstance(e, Binary):
        p = _PREC[e.op]
        # Left-associative chains render flat on the left; the right operand
        # (and both sides of non-associative comparisons) re-parenthesize at
        # equal precedence so the reparse reproduces the tree exactly.
        left = _render(e.left, p if e.op in _LEFT_ASSOC else p + 1)
        right = _render(e.right, p + 1)
        sep = " " if e.op in ("&", "|") else ""
        s = f"{left}{sep}{e.op}{sep}{right}"
        if parent_prec > p:
            s = f"({s})"
        return s
    else:
        raise TypeError(f"unknown expression node {e!r}")
    return s


def render_update(u: Update) -> str:
    if u.assigns:
        assigns = " & ".join(f"({name}'={render_expr(expr)})" for name, expr in u.assigns)
    else:
        assigns = "true"
    return f"{render_expr(u.weight)}: {assigns}"


def render_command(c: Command) -> str:
    updates = " + ".join(render_update(u) for u in c.updates)
    return f"[] {render_expr(c.guard)} -> {updates};"


def render_model(m: ModelAst) -> str:
    lines = [m.model_kind, ""]
    for c in m.constants:
        if c.value is None:
            lines.append(f"const int {c.name};")
        else:
            lines.append(f"const int {c.name} = {c.value};")
    for p in m.params:
        lines.append(f"param double {p.prefix} = {' '.join(str(c) for c in p.counts)};")
    if m.constants or m.params:
        lines.append("")
    lines.append(f"module {m.module_name}")
    for v in m.variables:
        lines.append(
            f"  {v.name} : [{render_expr(v.lo)}..{render_expr(v.hi)}] init {render_expr(v.init)};"
        )
    if m.variables and m.commands:
        lines.append("")
    for c in m.commands:
        lines.append(f"  {render_command(c)}")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def render_property(p: PropertyAst) -> str:
    if p.kind == "bounded":
        return f"P=? [ F<={p.bound} {render_expr(p.target)} ]"
    return f"P=? [ F {render_expr(p.target)} ]"


# --- small builders used throughout the toolkit --------------------------------------

def var(name: str) -> Var:
    return Var(name)


def eq(name: str, value: int) -> Binary:
    return Binary("=", Var(name), IntLit(value))


def neq(name: str, value: int) -> Binary:
    return Binary("!=", Var(name), IntLit(value))


def conj(*parts: Expr) -> Expr:
    parts = tuple(p for p in parts if p is not None)
    if not parts:
        return BoolLit(True)
    out = parts[0]
    for p in parts[1:]:
        out = Binary("&", out, p)
    return out
