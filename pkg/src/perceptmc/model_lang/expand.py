"""Explicit-state expansion of a model AST into a sparse DTMC.

Expansion breadth-first explores the reachable states only.  Guards of
enabled commands must be mutually exclusive in every reachable state
(deterministic command choice); deadlock states get an implicit self-loop.
All probabilities are exact rationals and every row sums to exactly 1.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..errors import (
    OverlappingGuards,
    PerceptMcError,
    ProbabilitySumError,
    RangeViolation,
    UnboundConstant,
    UndeclaredVariable,
)
from .ast import Binary, BoolLit, Call, Command, DecLit, Expr, IntLit, ModelAst, Unary, Var
from . import parser as _parser

logger = logging.getLogger("perceptmc.expand")

# Weights that miss an exact sum of 1 by less than this are treated as a
# rounding artifact of 3-decimal tables and reconciled (largest weight wins).
WEIGHT_SUM_SLACK = 1e-9


@dataclass
class Dtmc:
    """Explicit sparse DTMC over integer variable valuations.

    `states[i]` is the valuation tuple of state i (order = `var_names`);
    `transitions[i]` lists (target index, probability) pairs whose
    probabilities sum to exactly 1.  State 0 is the initial state, and every
    state is reachable from it by construction.
    """

    var_names: tuple[str, ...]
    states: list[tuple[int, ...]]
    transitions: list[list[tuple[int, Fraction]]]
    constants: dict[str, int]
    initial: int = 0
    deadlocks: int = 0

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def var_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.var_names)}

    def compile_expr(self, expr: Expr | str) -> Callable[[tuple[int, ...]], object]:
        if isinstance(expr, str):
            expr = _parser.parse_expression(expr)
        return compile_state_expr(expr, self.var_index, self.constants)

    def states_matching(self, expr: Expr | str) -> list[int]:
        fn = self.compile_expr(expr)
        return [i for i, s in enumerate(self.states) if fn(s)]

    def state_str(self, i: int) -> str:
        return "(" + ", ".join(
            f"{n}={v}" for n, v in zip(self.var_names, self.states[i])
        ) + ")"

    def validate(self) -> None:
        for i, row in enumerate(self.transitions):
            total = sum(p for _, p in row)
            if total != 1:
                raise ProbabilitySumError(f"state {self.state_str(i)} row sums to {total}")
            for _, p in row:
                if p < 0 or p > 1:
                    raise ProbabilitySumError(f"state {self.state_str(i)} has probability {p}")


# --- compiling expressions over state tuples -------------------------------------

def _pycode(e: Expr, var_index: dict[str, int], consts: dict[str, int]) -> str:
    if isinstance(e, IntLit):
        return repr(e.value)
    if isinstance(e, BoolLit):
        return "True" if e.value else "False"
    if isinstance(e, DecLit):
        raise PerceptMcError("decimal literals are not allowed in state expressions")
    if isinstance(e, Var):
        if e.name in var_index:
            return f"s[{var_index[e.name]}]"
        if e.name in consts:
            value = consts[e.name]
            if value is None:
                raise UnboundConstant(f"constant {e.name!r} is unbound")
            return repr(value)
        raise UndeclaredVariable(f"undeclared name {e.name!r} in state expression")
    if isinstance(e, Unary):
        inner = _pycode(e.operand, var_index, consts)
        return f"(not {inner})" if e.op == "!" else f"(-{inner})"
    if isinstance(e, Binary):
        if e.op == "/":
            raise PerceptMcError("division is not allowed in state expressions")
        op = {"=": "==", "&": "and", "|": "or"}.get(e.op, e.op)
        left = _pycode(e.left, var_index, consts)
        right = _pycode(e.right, var_index, consts)
        return f"({left} {op} {right})"
    if isinstance(e, Call):
        args = ", ".join(_pycode(a, var_index, consts) for a in e.args)
        return f"{e.func}({args})"
    raise TypeError(f"unknown expression node {e!r}")


def compile_state_expr(expr: Expr, var_index: dict[str, int],
                       consts: dict[str, int]) -> Callable:
    src = _pycode(expr, var_index, consts)
    return eval(f"lambda s: {src}", {"__builtins__": {}, "min": min, "max": max})


# --- constant expression evaluation ------------------------------------------------

def eval_const_expr(e: Expr, env: dict):
    """Evaluate an expression over constants (and, for parametric models,
    parameter atoms).  Values combine with ordinary arithmetic."""
    if isinstance(e, IntLit):
        return Fraction(e.value)
    if isinstance(e, DecLit):
        return Fraction(e.text)
    if isinstance(e, BoolLit):
        raise PerceptMcError("boolean where a numeric constant was expected")
    if isinstance(e, Var):
        if e.name not in env:
            raise UnboundConstant(f"{e.name!r} is not a known constant")
        value = env[e.name]
        if value is None:
            raise UnboundConstant(f"constant {e.name!r} is unbound")
        return value
    if isinstance(e, Unary):
        if e.op == "-":
            return -eval_const_expr(e.operand, env)
        raise PerceptMcError("'!' in a numeric constant expression")
    if isinstance(e, Binary):
        left = eval_const_expr(e.left, env)
        right = eval_const_expr(e.right, env)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if e.op == "/":
            return left / right
        raise PerceptMcError(f"operator {e.op!r} in a numeric constant expression")
    if isinstance(e, Call):
        args = [eval_const_expr(a, env) for a in e.args]
        return min(args) if e.func == "min" else max(args)
    raise TypeError(f"unknown expression node {e!r}")


def _as_int(value, what: str) -> int:
    if isinstance(value, Fraction):
        if value.denominator != 1:
            raise PerceptMcError(f"{what} must be an integer, got {value}")
        return int(value)
    if isinstance(value, int):
        return value
    raise PerceptMcError(f"{what} must be an integer, got {value!r}")


def resolve_constants(ast: ModelAst, bindings: dict[str, int] | None) -> dict[str, int]:
    consts: dict[str, int | None] = {c.name: c.value for c in ast.constants}
    for name, value in (bindings or {}).items():
        if name not in consts:
            raise UndeclaredVariable(f"binding for undeclared constant {name!r}")
        consts[name] = int(value)
    unbound = sorted(n for n, v in consts.items() if v is None)
    if unbound:
        raise UnboundConstant(f"unbound constant(s): {unbound}")
    return consts  # type: ignore[return-value]


# --- guard pin-indexing (fast command dispatch) --------------------------------------

def _conjuncts(e: Expr):
    if isinstance(e, Binary) and e.op == "&":
        yield from _conjuncts(e.left)
        yield from _conjuncts(e.right)
    else:
        yield e


def _guard_pins(guard: Expr, var_index: dict[str, int]) -> dict[int, int] | None:
    """Top-level `var = literal` conjuncts, or None if the guard is unsatisfiable."""
    pins: dict[int, int] = {}
    for c in _conjuncts(guard):
        if isinstance(c, Binary) and c.op == "=":
            a, b = c.left, c.right
            if isinstance(a, Var) and isinstance(b, IntLit) and a.name in var_index:
                idx, val = var_index[a.name], b.value
            elif isinstance(b, Var) and isinstance(a, IntLit) and b.name in var_index:
                idx, val = var_index[b.name], a.value
            else:
                continue
            if idx in pins and pins[idx] != val:
                return None
            pins[idx] = val
    return pins


class _CommandIndex:
    """Groups commands by their pinned variables so that only candidates with
    matching values are guard-checked per state."""

    def __init__(self, pinsets: list[dict[int, int] | None]):
        self.always: list[int] = []
        self.groups: list[tuple[tuple[int, ...], dict[tuple[int, ...], list[int]]]] = []
        by_vars: dict[tuple[int, ...], dict[tuple[int, ...], list[int]]] = {}
        for ci, pins in enumerate(pinsets):
            if pins is None:
                continue  # unsatisfiable guard; command can never fire
            if not pins:
                self.always.append(ci)
                continue
            keyvars = tuple(sorted(pins))
            vals = tuple(pins[v] for v in keyvars)
            by_vars.setdefault(keyvars, {}).setdefault(vals, []).append(ci)
        self.groups = [(kv, m) for kv, m in by_vars.items()]

    def candidates(self, state: tuple[int, ...]):
        for keyvars, mapping in self.groups:
            vals = tuple(state[i] for i in keyvars)
            hit = mapping.get(vals)
            if hit:
                yield from hit
        yield from self.always


# --- the expansion engine ---------------------------------------------------------------

def _prepare_updates(cmd: Command, weight_eval, keep_zero_edges: bool):
    """Evaluate a command's constant weights, reconcile rounded sums, and
    return [(weight, assigns)] with zero-weight updates dropped by default."""
    weights = [weight_eval(u.weight) for u in cmd.updates]
    for w in weights:
        if isinstance(w, Fraction) and (w < 0 or w > 1):
            raise ProbabilitySumError(
                f"command at line {cmd.line}: weight {w} outside [0, 1]"
            )
    total = sum(weights)
    if total != 1:
        all_exact = all(isinstance(w, Fraction) for w in weights)
        if all_exact and abs(float(total) - 1.0) < WEIGHT_SUM_SLACK:
            k = max(range(len(weights)), key=lambda i: weights[i])
            adjusted = weights[k] + (1 - total)
            logger.warning(
                "command at line %d: weights sum to %s; adjusting largest "
                "weight %s -> %s", cmd.line, total, weights[k], adjusted,
            )
            weights[k] = adjusted
        else:
            raise ProbabilitySumError(
                f"command at line {cmd.line}: update weights sum to {total}, not 1"
            )
    out = []
    for w, u in zip(weights, cmd.updates):
        if w == 0 and not keep_zero_edges:
            continue
        out.append((w, u.assigns))
    return out


def expand_engine(
    ast: ModelAst,
    bindings: dict[str, int] | None = None,
    *,
    weight_eval=None,
    keep_zero_edges: bool = False,
):
    """Shared BFS expansion; returns (dtmc_fields, consts).

    `weight_eval(expr)` turns a constant weight expression into a probability
    value; the default produces exact Fractions.  Parametric expansion plugs
    in an evaluator producing rational functions.
    """
    consts = resolve_constants(ast, bindings)
    if weight_eval is None:
        env = {n: Fraction(v) for n, v in consts.items()}
        weight_eval = lambda e: eval_const_expr(e, env)
    one = weight_eval(IntLit(1))

    var_names = tuple(v.name for v in ast.variables)
    if not var_names:
        raise PerceptMcError("model declares no variables")
    var_index = {n: i for i, n in enumerate(var_names)}

    env_int = dict(consts)
    ranges = []
    init = []
    for v in ast.variables:
        lo = _as_int(eval_const_expr(v.lo, env_int), f"lower bound of {v.name}")
        hi = _as_int(eval_const_expr(v.hi, env_int), f"upper bound of {v.name}")
        iv = _as_int(eval_const_expr(v.init, env_int), f"init of {v.name}")
        if lo > hi:
            raise RangeViolation(f"variable {v.name}: empty range [{lo}..{hi}]")
        if not (lo <= iv <= hi):
            raise RangeViolation(f"variable {v.name}: init {iv} outside [{lo}..{hi}]")
        ranges.append((lo, hi))
        init.append(iv)

    guards = [compile_state_expr(c.guard, var_index, consts) for c in ast.commands]
    pins = [_guard_pins(c.guard, var_index) for c in ast.commands]
    index = _CommandIndex(pins)
    prepared = []
    for cmd in ast.commands:
        assigns_compiled = []
        for w, assigns in _prepare_updates(cmd, weight_eval, keep_zero_edges):
            compiled = tuple(
                (var_index[n], compile_state_expr(e, var_index, consts))
                for n, e in assigns
            )
            assigns_compiled.append((w, compiled))
        prepared.append(assigns_compiled)

    initial = tuple(init)
    state_ids: dict[tuple[int, ...], int] = {initial: 0}
    states = [initial]
    rows: list = []
    work = deque([0])
    deadlocks = 0
    deadlock_example = None

    while work:
        si = work.popleft()
        state = states[si]
        enabled = [ci for ci in index.candidates(state) if guards[ci](state)]
        if len(enabled) > 1:
            lines = [ast.commands[ci].line for ci in enabled]
            raise OverlappingGuards(
                f"commands at lines {lines} all enabled in state "
                + "(" + ", ".join(f"{n}={v}" for n, v in zip(var_names, state)) + ")"
            )
        if not enabled:
            deadlocks += 1
            if deadlock_example is None:
                deadlock_example = state
            rows.append([(si, one)])
            continue
        ci = enabled[0]
        acc: dict[int, object] = {}
        for w, compiled in prepared[ci]:
            new = list(state)
            for vi, fn in compiled:
                value = fn(state)
                lo, hi = ranges[vi]
                if not (lo <= value <= hi):
                    raise RangeViolation(
                        f"command at line {ast.commands[ci].line}: update drives "
                        f"{var_names[vi]} to {value}, outside [{lo}..{hi}]"
                    )
                new[vi] = value
            tgt = tuple(new)
            ti = state_ids.get(tgt)
            if ti is None:
                ti = len(states)
                state_ids[tgt] = ti
                states.append(tgt)
                work.append(ti)
            if ti in acc:
                acc[ti] = acc[ti] + w
            else:
                acc[ti] = w
        rows.append(sorted(acc.items()))

    if deadlocks:
        logger.warning(
            "%d deadlock state(s) absorbed with implicit self-loops (e.g. %s)",
            deadlocks,
            "(" + ", ".join(f"{n}={v}" for n, v in zip(var_names, deadlock_example)) + ")",
        )
    return var_names, states, rows, consts, deadlocks


def expand(ast: ModelAst, bindings: dict[str, int] | None = None,
           *, keep_zero_edges: bool = False) -> Dtmc:
    """Expand a (non-parametric) model into an explicit DTMC."""
    if ast.params:
        raise PerceptMcError(
            "model declares parameter rows; use parametric.expand_parametric"
        )
    var_names, states, rows, consts, deadlocks = expand_engine(
        ast, bindings, keep_zero_edges=keep_zero_edges
    )
    m = Dtmc(
        var_names=var_names,
        states=states,
        transitions=rows,
        constants=consts,
        deadlocks=deadlocks,
    )
    m.validate()
    return m
