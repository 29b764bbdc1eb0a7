"""Exact scalars of the form p + q*sqrt(2) with arbitrary-precision rational p, q.

This tiny quadratic extension of the rationals is just big enough to hold
every grid the samplers build (uniform rational grids and their
irrational-shifted cousins) while keeping "is this point rational?"
decidable.  Addition, subtraction, multiplication, and comparison are
exact; floats are deliberately rejected as operands so the exact regime
cannot be contaminated silently.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .errors import ScalarRegimeError

_Rational = (int, Fraction)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    raise TypeError


class QuadExtScalar:
    """Immutable exact number p + q*sqrt(2)."""

    __slots__ = ("p", "q")

    def __init__(self, p: Union[int, Fraction] = 0, q: Union[int, Fraction] = 0):
        if isinstance(p, float) or isinstance(q, float):
            raise ScalarRegimeError(
                "QuadExtScalar components must be int or Fraction, not float"
            )
        object.__setattr__(self, "p", _as_fraction(p))
        object.__setattr__(self, "q", _as_fraction(q))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExtScalar is immutable")

    # -- coercion -----------------------------------------------------------

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, QuadExtScalar):
            return other
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, _Rational):
            return cls(other, 0)
        if isinstance(other, float):
            # Arithmetic with floats would silently leave the exact regime.
            raise ScalarRegimeError(
                "cannot mix QuadExtScalar arithmetic with float operands"
            )
        return NotImplemented

    # -- predicates ---------------------------------------------------------

    def is_rational(self) -> bool:
        """True exactly when the sqrt(2) coefficient vanishes."""
        return self.q == 0

    def _sign(self) -> int:
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return (q > 0) - (q < 0)
        if p > 0 and q > 0:
            return 1
        if p < 0 and q < 0:
            return -1
        # Opposite signs: compare p^2 against 2 q^2, exact in rationals.
        d = p * p - 2 * q * q
        mag = (d > 0) - (d < 0)
        return mag if p > 0 else -mag

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtScalar(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtScalar(self.p - o.p, self.q - o.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtScalar(o.p - self.p, o.q - self.q)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return QuadExtScalar(
            self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        norm = o.p * o.p - 2 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in QuadExtScalar")
        inv = QuadExtScalar(o.p / norm, -o.q / norm)
        return self * inv

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __neg__(self):
        return QuadExtScalar(-self.p, -self.q)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self._sign() < 0 else self

    # -- comparison ---------------------------------------------------------
    # Comparisons accept floats (converted exactly to Fraction); arithmetic
    # does not.  Comparing against a float threshold loses nothing.

    def _diff_sign(self, other) -> int:
        if isinstance(other, float):
            if not math.isfinite(other):
                return -1 if other > 0 else 1
            other = Fraction(other)
        o = (
            other
            if isinstance(other, QuadExtScalar)
            else QuadExtScalar(other, 0)
            if isinstance(other, _Rational) and not isinstance(other, bool)
            else None
        )
        if o is None:
            raise TypeError(f"cannot compare QuadExtScalar with {type(other).__name__}")
        return QuadExtScalar(self.p - o.p, self.q - o.q)._sign()

    def __eq__(self, other):
        try:
            return self._diff_sign(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._diff_sign(other) < 0

    def __le__(self, other):
        return self._diff_sign(other) <= 0

    def __gt__(self, other):
        return self._diff_sign(other) > 0

    def __ge__(self, other):
        return self._diff_sign(other) >= 0

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, "sqrt2"))

    # -- conversion and display ---------------------------------------------

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(2.0)

    def __repr__(self) -> str:
        if self.q == 0:
            return f"QuadExtScalar({self.p!r})"
        return f"QuadExtScalar({self.p!r}, {self.q!r})"

    def __str__(self) -> str:
        if self.q == 0:
            return str(self.p)
        return f"{self.p} + {self.q}*sqrt(2)"


SQRT2 = QuadExtScalar(0, 1)

# Shift used by irrational-shifted grids: (sqrt(2) - 1) / 2.  Exactly
# representable here, strictly between 0 and 1/2, and irrational, so interior
# cut points of a shifted grid over rational endpoints are never rational.
IRRATIONAL_SHIFT = QuadExtScalar(Fraction(-1, 2), Fraction(1, 2))


def is_exact_scalar(x) -> bool:
    """True for scalars that live in the exact regime (int, Fraction, QuadExtScalar)."""
    return isinstance(x, (int, Fraction, QuadExtScalar)) and not isinstance(x, bool)
