"""Reduced rational functions num/den over Q[x, y, mu, eps, u]."""

from __future__ import annotations

from typing import Mapping

from canardkit.errors import PoleAtPoint, ZeroDenominator
from canardkit.algebra.gcd import poly_gcd
from canardkit.algebra.polynomial import Polynomial, var_index
from canardkit.algebra.rational import ONE, Rational, lcm, to_rational

_ONE = Polynomial.constant(1)
_ZERO = Polynomial.constant(0)


def _scalar_normalize(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    # num, den coprime; make both integral with joint content 1 and den's lc > 0
    c, den = den.primitive()
    if c != 1:
        num = num.scale(1 / c)
    d = 1
    for a in num.terms.values():
        d = lcm(d, int(a.denominator))
    if d != 1:
        # content of d*num is coprime to d, and den is integer-primitive
        num = num.scale(d)
        den = den.scale(d)
    return num, den


class RationalFunction:
    """Immutable reduced quotient of polynomials.

    Invariants: ``den`` is nonzero; ``gcd(num, den) == 1``; numerator and
    denominator have integer coefficients with no common integer factor;
    the denominator's graded-lex leading coefficient is positive.  Equal
    values therefore have identical representations.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        num = _coerce_poly(num)
        den = _ONE if den is None else _coerce_poly(den)
        if not den:
            raise ZeroDenominator("rational function with zero denominator")
        if not num:
            num, den = _ZERO, _ONE
        elif not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = num.exact_div(g)
                den = den.exact_div(g)
        num, den = _scalar_normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _reduced(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        # caller guarantees gcd(num, den) == 1
        r = object.__new__(cls)
        if not num:
            num, den = _ZERO, _ONE
        r.num, r.den = _scalar_normalize(num, den)
        r._hash = None
        return r

    @classmethod
    def coerce(cls, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return cls._reduced(_coerce_poly(other), _ONE)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_constant():
            raise ValueError("rational function has a non-constant denominator")
        return self.num.scale(1 / self.den.constant_value())

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("rational function is not constant")
        return self.num.constant_term() / self.den.constant_value()

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.num.variables()) | set(self.den.variables())))

    def depends_on(self, v) -> bool:
        return self.num.depends_on(v) or self.den.depends_on(v)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.coerce(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- field operations --------------------------------------------------

    def __neg__(self) -> "RationalFunction":
        r = object.__new__(RationalFunction)
        r.num, r.den, r._hash = -self.num, self.den, None
        return r

    def __add__(self, other) -> "RationalFunction":
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.num:
            return self
        if not self.num:
            return other
        a, b = self, other
        if a.den == b.den:
            return RationalFunction(a.num + b.num, a.den)
        g = _ONE if (a.den.is_constant() or b.den.is_constant()) else poly_gcd(a.den, b.den)
        if g.is_constant():
            # coprime denominators: the cross sum is already reduced
            return RationalFunction._reduced(a.num * b.den + b.num * a.den, a.den * b.den)
        bd = b.den.exact_div(g)
        ad = a.den.exact_div(g)
        num = a.num * bd + b.num * ad
        den = a.den * bd
        return RationalFunction(num, den)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalFunction":
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFunction":
        return RationalFunction.coerce(other) - self

    def __mul__(self, other) -> "RationalFunction":
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num or not other.num:
            return RationalFunction._reduced(_ZERO, _ONE)
        an, ad, bn, bd = self.num, self.den, other.num, other.den
        if not bd.is_constant() and not an.is_constant():
            g1 = poly_gcd(an, bd)
            if not g1.is_constant():
                an, bd = an.exact_div(g1), bd.exact_div(g1)
        if not ad.is_constant() and not bn.is_constant():
            g2 = poly_gcd(bn, ad)
            if not g2.is_constant():
                bn, ad = bn.exact_div(g2), ad.exact_div(g2)
        return RationalFunction._reduced(an * bn, ad * bd)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.num:
            raise ZeroDenominator("inverse of the zero rational function")
        return RationalFunction._reduced(self.den, self.num)

    def __truediv__(self, other) -> "RationalFunction":
        try:
            other = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction._reduced(self.num ** k, self.den ** k)

    def scale(self, c) -> "RationalFunction":
        c = to_rational(c)
        return RationalFunction._reduced(self.num.scale(c), self.den)

    # -- calculus and evaluation -------------------------------------------

    def diff(self, v) -> "RationalFunction":
        v = var_index(v)
        dn = self.num.diff(v)
        if self.den.is_constant():
            return RationalFunction._reduced(dn, self.den)
        dd = self.den.diff(v)
        if not dd:
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def subs(self, v, value) -> "RationalFunction":
        """Substitute a polynomial, rational function or constant for ``v``."""
        v = var_index(v)
        if not self.depends_on(v):
            return self
        if not isinstance(value, RationalFunction):
            value = _coerce_poly(value)
            return RationalFunction(self.num.subs(v, value), self.den.subs(v, value))
        if value.den.is_constant():
            p = value.as_polynomial()
            return RationalFunction(self.num.subs(v, p), self.den.subs(v, p))
        # homogenize: num(n/d) * d**D over den(n/d) * d**D
        top = max(self.num.degree(v), self.den.degree(v))
        n, d = value.num, value.den
        npow = [_ONE]
        dpow = [_ONE]
        for _ in range(top):
            npow.append(npow[-1] * n)
            dpow.append(dpow[-1] * d)

        def homog(p: Polynomial) -> Polynomial:
            acc = _ZERO
            for k, c in p.coefficients_in(v).items():
                acc = acc + c * npow[k] * dpow[top - k]
            return acc

        return RationalFunction(homog(self.num), homog(self.den))

    def evaluate(self, point: Mapping) -> Rational:
        d = self.den.evaluate(point)
        if not d:
            raise PoleAtPoint(f"denominator {self.den} vanishes at {dict(point)}")
        return self.num.evaluate(point) / d

    def partial_evaluate(self, point: Mapping) -> "RationalFunction":
        r = self
        for k, val in point.items():
            r = r.subs(k, Polynomial.constant(val))
        return r

    def evaluate_float(self, point: Mapping[int, float]) -> float:
        return self.num.evaluate_float(point) / self.den.evaluate_float(point)

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        if self.den == _ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RationalFunction({str(self)!r})"

    def to_json(self) -> dict:
        return {"num": str(self.num), "den": str(self.den)}


def _coerce_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, RationalFunction):
        return value.as_polynomial()
    return Polynomial.constant(value)


def eval_rational(p, point: Mapping) -> Rational:
    """Exact value of a polynomial or rational function at ``point``."""
    if isinstance(p, Polynomial):
        return p.evaluate(point)
    return RationalFunction.coerce(p).evaluate(point)


def partial_derivative(p, v):
    return p.diff(v)


ONE_RF = RationalFunction._reduced(_ONE, _ONE)
ZERO_RF = RationalFunction._reduced(_ZERO, _ONE)
