"""A small DTMC modeling language (a PRISM-syntax subset) and its tooling.

Submodules:
  ast     -- expression and model AST node types, plus rendering back to text
  parser  -- lexer and recursive-descent parser for models and properties
  expand  -- explicit-state expansion of a model into a Dtmc
  emit    -- generation of perception-abstraction command fragments
"""

from .ast import (
    Binary,
    BoolLit,
    Call,
    Command,
    ConstDecl,
    DecLit,
    IntLit,
    ModelAst,
    ParamRow,
    PropertyAst,
    Unary,
    Update,
    Var,
    VarDecl,
    render_expr,
    render_model,
    render_property,
)
from .parser import parse_expression, parse_model, parse_property
from .expand import Dtmc, expand
from .emit import abstraction_commands, emit_abstraction_commands

__all__ = [
    "Binary", "BoolLit", "Call", "Command", "ConstDecl", "DecLit", "IntLit",
    "ModelAst", "ParamRow", "PropertyAst", "Unary", "Update", "Var", "VarDecl",
    "render_expr", "render_model", "render_property",
    "parse_expression", "parse_model", "parse_property",
    "Dtmc", "expand",
    "abstraction_commands", "emit_abstraction_commands",
]
