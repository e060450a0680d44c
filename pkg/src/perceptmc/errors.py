"""Exception types shared across the toolkit.

Every error raised by the library derives from PerceptMcError so callers
(and the CLI) can distinguish analysis failures from genuine bugs.
"""


class PerceptMcError(Exception):
    """Base class for all toolkit errors."""


# --- confusion matrices / abstractions ---------------------------------------

class NonIntegerEntry(PerceptMcError):
    """A confusion-matrix cell is not an integer."""


class NegativeEntry(PerceptMcError):
    """A confusion-matrix cell is negative."""


class DimensionMismatch(PerceptMcError):
    """Tabular input does not have the expected K x K shape."""


class EmptyRow(PerceptMcError):
    """A state has zero observations; its distribution is undefined."""

    def __init__(self, label, message=None):
        self.label = label
        super().__init__(message or f"no observations for state {label!r}")


class CountOverflowOrOrder(PerceptMcError):
    """passed > total, or total == 0, in guard pass-rate counts."""


# --- model language -----------------------------------------------------------

class ModelSyntaxError(PerceptMcError):
    """Parse failure, with source location and what was expected."""

    def __init__(self, line, col, expected, found=None):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        where = f"line {line}, col {col}"
        detail = f"expected {expected}"
        if found is not None:
            detail += f", found {found!r}"
        super().__init__(f"{where}: {detail}")


class UndeclaredVariable(PerceptMcError):
    """An expression references a name that is not declared."""


class DuplicateDeclaration(PerceptMcError):
    """A constant, parameter row, or variable is declared twice."""


class UnboundConstant(PerceptMcError):
    """A symbolic constant was not bound before expansion."""


class OverlappingGuards(PerceptMcError):
    """Two commands are enabled in the same reachable state (an MDP, not a DTMC)."""


class ProbabilitySumError(PerceptMcError):
    """A command's update weights do not form a probability distribution."""


class RangeViolation(PerceptMcError):
    """An update drives a variable outside its declared range."""


# --- model checking -----------------------------------------------------------

class SingularSystem(PerceptMcError):
    """The reachability linear system is singular (should be impossible after
    prob-0 states are removed)."""


class TargetUnparsable(PerceptMcError):
    """The target expression of a property cannot be parsed or evaluated."""


# --- parametric model checking -------------------------------------------------

class StructuralZeroDenominator(PerceptMcError):
    """State elimination hit a state whose symbolic self-loop probability is
    identically 1."""


class RowAllZeroObservations(PerceptMcError):
    """An estimated row has no observations at all; it cannot be parameterized."""


class DivideByZero(PerceptMcError):
    """Rational-function evaluation at a point where the denominator vanishes."""


class UnboundParameter(PerceptMcError):
    """A valuation does not bind every parameter of a rational function."""


# --- confidence intervals -------------------------------------------------------

class InfeasibleRegion(PerceptMcError):
    """Row intervals admit no valid probability distribution."""


class CellTimeout(PerceptMcError):
    """A sweep cell exceeded its wall-clock budget."""


# --- guard weaving / case study --------------------------------------------------

class VariableNameCollision(PerceptMcError):
    """The guard machinery needs a variable/constant name already in use."""


class LabelSpaceMismatch(PerceptMcError):
    """An abstraction's label space does not match the scenario's."""


# --- simulation -------------------------------------------------------------------

class PathExplosion(PerceptMcError):
    """Exact path enumeration exceeded its expansion budget."""
