"""Arbitrary-precision rationals.

``Rational`` is ``gmpy2.mpq`` when gmpy2 is importable and
``fractions.Fraction`` otherwise.  Both keep numerator and denominator
coprime with a positive denominator, hash identically for equal values,
and print as ``p/q``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as Rational

    BACKEND = "gmpy2"
except ImportError:  # pragma: no cover
    Rational = Fraction
    BACKEND = "fractions"

ZERO = Rational(0)
ONE = Rational(1)

__all__ = ["Rational", "ZERO", "ONE", "BACKEND", "to_rational", "rational_str", "lcm"]


def to_rational(value) -> Rational:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to ``Rational``.

    Floats are rejected: the symbolic path never touches binary floating
    point.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals")
    if isinstance(value, str):
        return Rational(Fraction(value.strip().replace("−", "-")))
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return Rational(value)


def rational_str(q) -> str:
    q = to_rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b
