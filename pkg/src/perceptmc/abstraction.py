"""Probabilistic perception abstractions built from confusion-matrix data.

A classifier's confusion matrix over a finite, labeled state space is turned
into a row-stochastic map from true states to distributions over estimated
states.  Probabilities are kept as exact integer ratios; decimal output is a
rendering concern only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction

from .errors import (
    CountOverflowOrOrder,
    DimensionMismatch,
    EmptyRow,
    NegativeEntry,
    NonIntegerEntry,
)


@dataclass(frozen=True)
class StateSpace:
    """An ordered finite set of state labels with a label <-> index bijection."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise DimensionMismatch("state space needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise DimensionMismatch(f"duplicate labels in {self.labels}")
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        """0-based position of a label."""
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}; space is {self.labels}") from None

    def label(self, k: int) -> str:
        return self.labels[k]


def _parse_cell(text: str, row: int, col: int) -> int:
    text = text.strip()
    try:
        value = int(text)
    except ValueError:
        raise NonIntegerEntry(f"row {row}, col {col}: {text!r} is not an integer") from None
    if value < 0:
        raise NegativeEntry(f"row {row}, col {col}: negative count {value}")
    return value


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts; rows are true states, columns are predicted states."""

    space: StateSpace
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = self.space.size
        if len(self.counts) != k or any(len(r) != k for r in self.counts):
            raise DimensionMismatch(
                f"counts shape {len(self.counts)}x? does not match K={k}"
            )
        for i, row in enumerate(self.counts):
            for j, c in enumerate(row):
                if not isinstance(c, int) or isinstance(c, bool):
                    raise NonIntegerEntry(f"row {i}, col {j}: {c!r} is not an integer")
                if c < 0:
                    raise NegativeEntry(f"row {i}, col {j}: negative count {c}")

    @property
    def total(self) -> int:
        return sum(sum(r) for r in self.counts)

    def row(self, label: str) -> tuple[int, ...]:
        return self.counts[self.space.index(label)]

    def row_total(self, label: str) -> int:
        return sum(self.row(label))

    def count(self, true_label: str, est_label: str) -> int:
        return self.counts[self.space.index(true_label)][self.space.index(est_label)]


def load_confusion_matrix(source: str, space: StateSpace | None = None) -> ConfusionMatrix:
    """Parse confusion-matrix text: a label header line, then K rows of K ints.

    Fields are comma-separated; tab-separated input is accepted too.  When a
    `space` is supplied, the header must match its labels exactly.
    """
    lines = [ln.strip() for ln in source.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise DimensionMismatch("empty confusion-matrix input")
    sep = "\t" if "\t" in lines[0] else ","
    header = tuple(f.strip() for f in lines[0].split(sep))
    if space is None:
        space = StateSpace(header)
    elif header != space.labels:
        raise DimensionMismatch(
            f"header labels {header} do not match expected {space.labels}"
        )
    k = space.size
    body = lines[1:]
    if len(body) != k:
        raise DimensionMismatch(f"expected {k} count rows, got {len(body)}")
    counts = []
    for i, ln in enumerate(body):
        fields = [f for f in (x.strip() for x in ln.split(sep)) if f != ""]
        if len(fields) != k:
            raise DimensionMismatch(f"row {i}: expected {k} columns, got {len(fields)}")
        counts.append(tuple(_parse_cell(f, i, j) for j, f in enumerate(fields)))
    return ConfusionMatrix(space=space, counts=tuple(counts))


def read_confusion_matrix(path, space: StateSpace | None = None) -> ConfusionMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return load_confusion_matrix(fh.read(), space)


def round_half_even(x: Fraction, digits: int = 3) -> float:
    """Round an exact ratio to `digits` decimals, ties to even, as a float."""
    q = Decimal(x.numerator) / Decimal(x.denominator)
    return float(q.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class PerceptionAbstraction:
    """Row-stochastic map true state -> distribution over estimated states.

    `probs[k][k']` is the exact ratio counts[k][k'] / row_total[k]; `row_obs[k]`
    is the number of observations backing row k.  `provenance` records whether
    the matrix was filtered by a run-time check ("guarded") or not.
    """

    space: StateSpace
    probs: tuple[tuple[Fraction, ...], ...]
    row_obs: tuple[int, ...]
    provenance: str = "unguarded"

    def __post_init__(self):
        for k, row in enumerate(self.probs):
            s = sum(row)
            if s != 1:
                raise ValueError(f"row {k} sums to {s}, not 1")

    def prob(self, true_label: str, est_label: str) -> Fraction:
        return self.probs[self.space.index(true_label)][self.space.index(est_label)]

    def row(self, true_label: str) -> tuple[Fraction, ...]:
        return self.probs[self.space.index(true_label)]

    def rounded(self, digits: int = 3) -> list[list[float]]:
        return [[round_half_even(p, digits) for p in row] for row in self.probs]

    def to_json(self, indent: int | None = None) -> str:
        payload = {
            "labels": list(self.space.labels),
            "row_obs": list(self.row_obs),
            "probs": [[[p.numerator, p.denominator] for p in row] for row in self.probs],
            "probs_rounded": self.rounded(),
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=indent)


@dataclass(frozen=True)
class GuardStatistics:
    """Pass counts for a run-time check; beta is the exact pass rate."""

    total: int
    passed: int

    def __post_init__(self):
        if self.total <= 0:
            raise CountOverflowOrOrder(f"total must be positive, got {self.total}")
        if self.passed < 0 or self.passed > self.total:
            raise CountOverflowOrOrder(
                f"passed={self.passed} outside [0, total={self.total}]"
            )

    @property
    def beta(self) -> Fraction:
        return Fraction(self.passed, self.total)

    @property
    def failed(self) -> int:
        return self.total - self.passed


@dataclass(frozen=True)
class ObservationFunction:
    """Per-state tuples of outgoing-transition observation counts."""

    space: StateSpace
    counts: tuple[tuple[int, ...], ...]

    def __call__(self, label: str) -> tuple[int, ...]:
        return self.counts[self.space.index(label)]


def build_abstraction(cm: ConfusionMatrix, provenance: str = "unguarded") -> PerceptionAbstraction:
    """Normalize each confusion-matrix row into an exact distribution.

    Raises EmptyRow for any state with zero observations: the distribution for
    an unobserved state is undefined, never silently uniform.
    """
    probs = []
    row_obs = []
    for k, row in enumerate(cm.counts):
        n = sum(row)
        if n == 0:
            raise EmptyRow(cm.space.label(k))
        probs.append(tuple(Fraction(c, n) for c in row))
        row_obs.append(n)
    return PerceptionAbstraction(
        space=cm.space, probs=tuple(probs), row_obs=tuple(row_obs), provenance=provenance
    )


def build_guarded_abstraction(cm_true: ConfusionMatrix) -> PerceptionAbstraction:
    """Abstraction over inputs that passed the run-time check.

    Arithmetic is identical to build_abstraction; conditioning on the check is
    carried entirely by the pre-filtered matrix and the provenance tag.
    """
    return build_abstraction(cm_true, provenance="guarded")


def estimate_beta(total: int, passed: int) -> GuardStatistics:
    """Pass rate of the run-time check over a representative input set."""
    return GuardStatistics(total=total, passed=passed)


def observations_of(cm: ConfusionMatrix) -> ObservationFunction:
    """Observation counts per state, straight from the confusion-matrix rows."""
    return ObservationFunction(space=cm.space, counts=cm.counts)


def identity_abstraction(space: StateSpace) -> PerceptionAbstraction:
    """The perfect-perception abstraction: each state maps to itself."""
    k = space.size
    probs = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(k)) for i in range(k)
    )
    return PerceptionAbstraction(
        space=space, probs=probs, row_obs=tuple(1 for _ in range(k)), provenance="identity"
    )
