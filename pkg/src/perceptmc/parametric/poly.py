"""Exact multivariate polynomials and rational functions.

Monomials are tuples of (variable, exponent) pairs sorted by variable name;
coefficients are exact rationals internally.  RationalFunction normalizes to
integer coefficients with content GCD and common-monomial-factor cancellation
(full multivariate GCD is deliberately out of scope).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import DivideByZero, UnboundParameter

Monomial = tuple[tuple[str, int], ...]

_EMPTY: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged: dict[str, int] = dict(a)
    for var, exp in b:
        merged[var] = merged.get(var, 0) + exp
    return tuple(sorted(merged.items()))


def _mono_key(m: Monomial):
    # graded lexicographic: total degree first, then variable/exponent order
    return (sum(e for _, e in m), m)


class Polynomial:
    """Immutable-by-convention sparse polynomial {monomial: coefficient}."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # --- constructors -----------------------------------------------------------

    @classmethod
    def const(cls, c) -> "Polynomial":
        c = Fraction(c)
        return cls({_EMPTY: c} if c != 0 else {})

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): Fraction(1)})

    # --- queries -----------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _EMPTY in self.terms)

    def const_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.terms[_EMPTY]

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return out

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self.terms), default=0)

    # --- arithmetic -----------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Polynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.const_value() == other
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # --- evaluation and rendering ------------------------------------------------------

    def evaluate(self, valuation: dict) -> Fraction | float:
        total = None
        for m, c in self.terms.items():
            value = c
            for var, exp in m:
                try:
                    value = value * valuation[var] ** exp
                except KeyError:
                    raise UnboundParameter(f"no value for parameter {var!r}") from None
            total = value if total is None else total + value
        if total is None:
            return Fraction(0)
        return total

    def content(self) -> Fraction:
        """gcd of coefficients (as a positive rational); 0 for the zero poly."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, 1) / den

    def monomial_gcd(self) -> Monomial:
        common: dict[str, int] | None = None
        for m in self.terms:
            exps = dict(m)
            if common is None:
                common = exps
            else:
                common = {
                    v: min(e, exps[v]) for v, e in common.items() if v in exps
                }
            if not common:
                return _EMPTY
        return tuple(sorted((common or {}).items()))

    def divide_monomial(self, m: Monomial) -> "Polynomial":
        if not m:
            return self
        shift = dict(m)
        out = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            for v, e in shift.items():
                exps[v] -= e
            out[tuple(sorted((v, e) for v, e in exps.items() if e != 0))] = c
        return Polynomial(out)

    def scaled(self, factor: Fraction) -> "Polynomial":
        if factor == 1:
            return self
        return Polynomial({m: c * factor for m, c in self.terms.items()})

    def leading_sign(self) -> int:
        if not self.terms:
            return 0
        lead = max(self.terms, key=_mono_key)
        return 1 if self.terms[lead] > 0 else -1

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_mono_key, reverse=True):
            c = self.terms[m]
            factors = [str(c)] if (c != 1 or not m) else []
            if c == -1 and m:
                factors = ["-1"]
            factors += [f"{v}^{e}" if e > 1 else v for v, e in m]
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


ZERO = Polynomial()
ONE = Polynomial.const(1)


class RationalFunction:
    """Exact ratio of two polynomials, normalized to integer coefficients."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *,
                 normalized: bool = False):
        den = ONE if den is None else den
        if den.is_zero():
            raise DivideByZero("rational function with zero denominator")
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c) -> "RationalFunction":
        c = Fraction(c)
        return cls(Polynomial.const(c.numerator), Polynomial.const(c.denominator))

    @classmethod
    def param(cls, name: str) -> "RationalFunction":
        return cls(Polynomial.var(name))

    # --- queries -------------------------------------------------------------------

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Fraction:
        return self.num.const_value() / self.den.const_value()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def __bool__(self):
        return not self.num.is_zero()

    # --- arithmetic -------------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise DivideByZero("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.const(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        # cross-multiplied comparison is exact regardless of normal form
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    # --- evaluation and rendering -----------------------------------------------------

    def evaluate(self, valuation: dict) -> Fraction | float:
        den = self.den.evaluate(valuation)
        if den == 0:
            raise DivideByZero("denominator vanishes at this valuation")
        return self.num.evaluate(valuation) / den

    def canonical_str(self) -> str:
        if self.den == ONE:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __str__(self):
        return self.canonical_str()

    __repr__ = __str__


def _normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if num.is_zero():
        return ZERO, ONE
    if num == den:
        return ONE, ONE
    # cancel a common monomial factor (e.g. x*A / x*B)
    g = _mono_gcd(num.monomial_gcd(), den.monomial_gcd())
    if g:
        num = num.divide_monomial(g)
        den = den.divide_monomial(g)
    # clear coefficient denominators, then divide out the shared integer content
    scale = _denominator_lcm(num) * _denominator_lcm(den)
    if scale != 1:
        num = num.scaled(scale)
        den = den.scaled(scale)
    shared = gcd(_int_content(num), _int_content(den))
    if shared > 1:
        num = num.scaled(Fraction(1, shared))
        den = den.scaled(Fraction(1, shared))
    if den.leading_sign() < 0:
        num = num.scaled(-1)
        den = den.scaled(-1)
    if den.is_const() and den.const_value() == 1:
        den = ONE
    return num, den


def _denominator_lcm(p: Polynomial) -> int:
    out = 1
    for c in p.terms.values():
        d = c.denominator
        out = out * d // gcd(out, d)
    return out


def _int_content(p: Polynomial) -> int:
    out = 0
    for c in p.terms.values():
        out = gcd(out, abs(c.numerator))
    return out if out else 1


def _mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    if not a or not b:
        return _EMPTY
    da, db = dict(a), dict(b)
    out = {v: min(e, db[v]) for v, e in da.items() if v in db}
    return tuple(sorted(out.items()))


RF_ZERO = RationalFunction(ZERO)
RF_ONE = RationalFunction(ONE)
