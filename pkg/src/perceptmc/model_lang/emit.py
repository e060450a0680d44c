"""Turn perception abstractions into model-language commands.

One command per true state:

    [] he=0 -> 0.675: (he_est'=0) + 0.304: (he_est'=1) + 0.021: (he_est'=2);

By default weights are emitted as exact integer ratios (`4748/7035`) so the
rendered text re-expands to the same transition rationals; `digits=3`
reproduces the rounded style of published listings.  Zero-probability
updates are omitted unless `include_zero` is set.
"""

from __future__ import annotations

import re
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction

from ..abstraction import PerceptionAbstraction
from ..errors import PerceptMcError
from . import parser as _parser
from .ast import Binary, Command, DecLit, Expr, IntLit, Update, Var, eq, render_command

_IDENT_OK = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _weight_expr(p: Fraction, digits: int | None) -> Expr:
    if digits is None:
        if p.denominator == 1:
            return IntLit(p.numerator)
        return Binary("/", IntLit(p.numerator), IntLit(p.denominator))
    q = Decimal(p.numerator) / Decimal(p.denominator)
    text = str(q.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))
    return DecLit(text)


def abstraction_commands(
    a: PerceptionAbstraction,
    true_var: str,
    est_var: str,
    guard_extra: Expr | str | None = None,
    *,
    extra_assigns: tuple[tuple[str, Expr], ...] = (),
    digits: int | None = None,
    include_zero: bool = False,
) -> list[Command]:
    """Build the perception commands as AST nodes.

    `extra_assigns` lets a model builder advance its phase counter in the
    same update; labels must parse as integers since they become variable
    values.
    """
    for name in (true_var, est_var):
        if not _IDENT_OK.match(name):
            raise PerceptMcError(f"{name!r} is not a valid variable name")
    if isinstance(guard_extra, str):
        guard_extra = _parser.parse_expression(guard_extra)
    try:
        values = [int(lab) for lab in a.space.labels]
    except ValueError:
        raise PerceptMcError(
            f"labels {a.space.labels} are not integers; cannot emit commands"
        ) from None

    commands = []
    for k, true_value in enumerate(values):
        guard = eq(true_var, true_value)
        if guard_extra is not None:
            guard = Binary("&", guard, guard_extra)
        updates = []
        for j, est_value in enumerate(values):
            p = a.probs[k][j]
            if p == 0 and not include_zero:
                continue
            assigns = ((est_var, IntLit(est_value)),) + tuple(extra_assigns)
            updates.append(Update(_weight_expr(p, digits), assigns))
        commands.append(Command(guard=guard, updates=tuple(updates)))
    return commands


def emit_abstraction_commands(
    a: PerceptionAbstraction,
    true_var: str,
    est_var: str,
    guard_extra: Expr | str | None = None,
    *,
    digits: int | None = None,
    include_zero: bool = False,
) -> str:
    """Render the perception commands as model fragment text."""
    commands = abstraction_commands(
        a, true_var, est_var, guard_extra, digits=digits, include_zero=include_zero
    )
    return "\n".join(render_command(c) for c in commands) + "\n"


def parametric_abstraction_commands(
    a: PerceptionAbstraction,
    true_var: str,
    est_var: str,
    prefixes: dict[str, str],
    guard_extra: Expr | str | None = None,
    *,
    extra_assigns: tuple[tuple[str, Expr], ...] = (),
    prune_zero: bool = True,
) -> tuple[list[Command], list[tuple[str, tuple[int, ...]]]]:
    """Perception commands in parametric style, plus their param-row
    declarations (prefix, observation counts).

    Each row's surviving outcomes get symbols prefix1..prefix(n-1); the last
    becomes `(1 - prefix1 - ...)`, matching the listing style of parametric
    model files.
    """
    if isinstance(guard_extra, str):
        guard_extra = _parser.parse_expression(guard_extra)
    values = [int(lab) for lab in a.space.labels]
    commands = []
    rows = []
    for k, true_value in enumerate(values):
        label = a.space.labels[k]
        prefix = prefixes[label]
        # probs are exact count/row_total ratios, so this recovers the counts.
        counts = tuple(int(p * a.row_obs[k]) for p in a.probs[k])
        keep = [j for j in range(len(values)) if counts[j] > 0 or not prune_zero]
        if not keep:
            raise PerceptMcError(f"row {label!r} has no observations")
        rows.append((prefix, tuple(counts[j] for j in keep)))
        guard = eq(true_var, true_value)
        if guard_extra is not None:
            guard = Binary("&", guard, guard_extra)
        updates = []
        if len(keep) == 1:
            assigns = ((est_var, IntLit(values[keep[0]])),) + tuple(extra_assigns)
            updates.append(Update(IntLit(1), assigns))
        else:
            symbols = [f"{prefix}{i}" for i in range(1, len(keep))]
            for pos, j in enumerate(keep):
                assigns = ((est_var, IntLit(values[j])),) + tuple(extra_assigns)
                if pos < len(symbols):
                    weight: Expr = Var(symbols[pos])
                else:
                    weight = IntLit(1)
                    for sym in symbols:
                        weight = Binary("-", weight, Var(sym))
                updates.append(Update(weight, assigns))
        commands.append(Command(guard=guard, updates=tuple(updates)))
    return commands, rows
