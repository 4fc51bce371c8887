"""Truncated power series in eps with rational-function coefficients.

``EpsSeries(coeffs)`` stands for ``c0 + c1*eps + ... + cN*eps**N + O(eps**(N+1))``.
The coefficients never contain ``eps`` themselves.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from canardkit.errors import DivergentLimit, NonInvertibleSeries, TruncationTooShort, ZeroDenominator
from canardkit.algebra.polynomial import EPS, Polynomial, var_index
from canardkit.algebra.ratfunc import ONE_RF, ZERO_RF, RationalFunction


class EpsSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = tuple(RationalFunction.coerce(c) for c in coeffs)
        if not cs:
            raise ValueError("a series needs at least its constant coefficient")
        for c in cs:
            if c.depends_on(EPS):
                raise ValueError("series coefficients must be free of eps")
        self.coeffs = cs

    @classmethod
    def _raw(cls, coeffs: Sequence[RationalFunction]) -> "EpsSeries":
        s = object.__new__(cls)
        s.coeffs = tuple(coeffs)
        return s

    @classmethod
    def zero(cls, order: int) -> "EpsSeries":
        return cls._raw([ZERO_RF] * (order + 1))

    @classmethod
    def constant(cls, value, order: int) -> "EpsSeries":
        return cls._raw([RationalFunction.coerce(value)] + [ZERO_RF] * order)

    @classmethod
    def eps(cls, order: int) -> "EpsSeries":
        cs = [ZERO_RF] * (order + 1)
        if order >= 1:
            cs[1] = ONE_RF
        return cls._raw(cs)

    @classmethod
    def from_polynomial(cls, p: Polynomial, order: int) -> "EpsSeries":
        """Read the eps-expansion of a polynomial (terms beyond ``order`` dropped)."""
        parts = p.coefficients_in(EPS)
        return cls._raw([RationalFunction._reduced(parts[k], Polynomial.constant(1)) if k in parts else ZERO_RF
                         for k in range(order + 1)])

    @classmethod
    def from_rational(cls, r: RationalFunction, order: int) -> "EpsSeries":
        return cls.from_polynomial(r.num, order) / cls.from_polynomial(r.den, order)

    # -- inspection --------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k: int) -> RationalFunction:
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None when zero through the order."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*eps^{k}" for k, c in enumerate(self.coeffs) if c) or "0"
        return f"EpsSeries({body} + O(eps^{self.order + 1}))"

    # -- arithmetic ----------------------------------------------------------

    def truncate(self, order: int) -> "EpsSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order of a series")
        return EpsSeries._raw(self.coeffs[: order + 1])

    def _coerce(self, other) -> "EpsSeries":
        if isinstance(other, EpsSeries):
            return other
        return EpsSeries.constant(other, self.order)

    def __add__(self, other) -> "EpsSeries":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return EpsSeries._raw([self.coeffs[k] + other.coeffs[k] for k in range(n + 1)])

    __radd__ = __add__

    def __neg__(self) -> "EpsSeries":
        return EpsSeries._raw([-c for c in self.coeffs])

    def __sub__(self, other) -> "EpsSeries":
        other = self._coerce(other)
        n = min(self.order, other.order)
        return EpsSeries._raw([self.coeffs[k] - other.coeffs[k] for k in range(n + 1)])

    def __rsub__(self, other) -> "EpsSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "EpsSeries":
        if not isinstance(other, EpsSeries):
            c = RationalFunction.coerce(other)
            return EpsSeries._raw([a * c for a in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = ZERO_RF
            for i in range(k + 1):
                if a[i] and b[k - i]:
                    acc = acc + a[i] * b[k - i]
            out.append(acc)
        return EpsSeries._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "EpsSeries":
        if k < 0:
            raise ValueError("negative series powers are not supported")
        result = EpsSeries.constant(ONE_RF, self.order)
        for _ in range(k):
            result = result * self
        return result

    def shift_down(self, k: int) -> "EpsSeries":
        """Divide by eps**k; the first k coefficients must vanish."""
        if any(self.coeffs[:k]):
            raise ValueError("series is not divisible by that power of eps")
        return EpsSeries._raw(self.coeffs[k:])

    def shift_up(self, k: int) -> "EpsSeries":
        """Multiply by eps**k keeping the truncation order."""
        if k == 0:
            return self
        return EpsSeries._raw(([ZERO_RF] * k + list(self.coeffs))[: len(self.coeffs)])

    def inverse(self) -> "EpsSeries":
        c0 = self.coeffs[0]
        if not c0:
            raise NonInvertibleSeries("series with vanishing constant term has no power-series inverse")
        inv0 = c0.inverse()
        out = [inv0]
        for k in range(1, len(self.coeffs)):
            acc = ZERO_RF
            for i in range(1, k + 1):
                if self.coeffs[i] and out[k - i]:
                    acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(acc * inv0))
        return EpsSeries._raw(out)

    def __truediv__(self, other) -> "EpsSeries":
        """Quotient with common eps-power cancellation.

        The result is truncated at min(orders) minus the cancelled power.
        """
        if not isinstance(other, EpsSeries):
            return self * RationalFunction.coerce(other).inverse()
        vd = other.valuation()
        if vd is None:
            raise ZeroDenominator("division by a series that vanishes through its order")
        if vd:
            vn = self.valuation()
            if vn is not None and vn < vd:
                raise NonInvertibleSeries("quotient has a pole at eps = 0")
            n = min(self.order, other.order)
            if vd > n:
                raise TruncationTooShort("truncation order too low to cancel the eps power")
            num = EpsSeries._raw(self.coeffs[vd: n + 1])
            den = EpsSeries._raw(other.coeffs[vd: n + 1])
            return num * den.inverse()
        n = min(self.order, other.order)
        return self.truncate(n) * other.truncate(n).inverse()

    # -- calculus ------------------------------------------------------------

    def diff(self, v) -> "EpsSeries":
        """Coefficient-wise partial derivative in a non-eps variable."""
        v = var_index(v)
        if v == EPS:
            return self.diff_eps()
        return EpsSeries._raw([c.diff(v) for c in self.coeffs])

    def diff_eps(self) -> "EpsSeries":
        """d/d(eps); the truncation order drops by one."""
        if self.order == 0:
            return EpsSeries.zero(0)
        return EpsSeries._raw([c.scale(k) for k, c in enumerate(self.coeffs) if k > 0])

    def subs(self, v, value) -> "EpsSeries":
        return EpsSeries._raw([c.subs(v, value) for c in self.coeffs])

    def evaluate_float(self, eps: float, point) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * eps + c.evaluate_float(point)
        return acc

    def to_polynomial_in_eps(self) -> RationalFunction:
        """Sum of the retained terms as a rational function of (x, ..., eps)."""
        acc = ZERO_RF
        e = Polynomial.var(EPS)
        for k, c in enumerate(self.coeffs):
            if c:
                acc = acc + c * RationalFunction.coerce(e ** k)
        return acc


def substitute_series(p: Polynomial, v, value: EpsSeries, order: int | None = None) -> EpsSeries:
    """Substitute a series for variable ``v`` in polynomial ``p``.

    Any ``eps`` occurring in ``p`` is read as the series variable.  The
    result is truncated at ``order`` (default: the order of ``value``).
    """
    v = var_index(v)
    if v == EPS:
        raise ValueError("substitute into eps through the series variable, not as a target")
    order = value.order if order is None else order
    if order > value.order:
        raise ValueError("requested order exceeds the order of the substituted series")
    value = value.truncate(order)
    parts = p.coefficients_in(v)
    top = max(parts) if parts else 0
    acc = EpsSeries.from_polynomial(parts.get(top, Polynomial()), order)
    for k in range(top - 1, -1, -1):
        acc = acc * value
        c = parts.get(k)
        if c is not None:
            acc = acc + EpsSeries.from_polynomial(c, order)
    return acc


def substitute(target, v, value, order: int | None = None):
    """Substitute ``value`` for ``v`` in a polynomial or rational function.

    Polynomial or rational-function values give a ``RationalFunction``.
    ``EpsSeries`` values give an ``EpsSeries``; the substituted
    denominator must then have a nonzero constant term
    (``NonInvertibleSeries`` otherwise, ``ZeroDenominator`` when it
    vanishes through the truncation order).  Use
    :func:`substitute_quotient` with :func:`eps_limit` for quotients whose
    denominator starts at a positive power of eps.
    """
    if isinstance(value, EpsSeries):
        num, den = substitute_quotient(target, v, value, order)
        if den.is_zero():
            raise ZeroDenominator("substituted denominator vanishes through the truncation order")
        if not den.coeffs[0]:
            raise NonInvertibleSeries("substituted denominator vanishes at eps = 0")
        return num / den
    return RationalFunction.coerce(target).subs(v, value)


def substitute_quotient(target, v, value: EpsSeries, order: int | None = None) -> tuple[EpsSeries, EpsSeries]:
    """(numerator series, denominator series) of ``target`` after substituting ``value``."""
    if isinstance(target, Polynomial):
        return substitute_series(target, v, value, order), EpsSeries.constant(ONE_RF, value.order if order is None else order)
    target = RationalFunction.coerce(target)
    return substitute_series(target.num, v, value, order), substitute_series(target.den, v, value, order)


def eps_limit(num: EpsSeries, den: EpsSeries) -> RationalFunction:
    """Limit eps -> 0 of num/den after cancelling the common leading eps power."""
    vd = den.valuation()
    if vd is None:
        raise ZeroDenominator("denominator series vanishes through its truncation order")
    vn = num.valuation()
    if vn is None:
        if vd <= num.order:
            return ZERO_RF
        raise TruncationTooShort("numerator truncated before the denominator's leading power")
    if vn < vd:
        raise DivergentLimit(f"numerator starts at eps^{vn}, denominator at eps^{vd}: pole at eps = 0")
    if vn > vd:
        return ZERO_RF
    return num.coeffs[vn] / den.coeffs[vd]


def series_coefficient_limit(num: EpsSeries, den: EpsSeries, k: int) -> RationalFunction:
    """Coefficient of eps**k in the (finite at eps = 0) quotient num/den.

    Equals ``lim_{eps->0} (1/k!) d^k/d eps^k (num/den)``.
    """
    vd = den.valuation()
    if vd is None:
        raise ZeroDenominator("denominator series vanishes through its truncation order")
    vn = num.valuation()
    if vn is not None and vn < vd:
        raise DivergentLimit(f"numerator starts at eps^{vn}, denominator at eps^{vd}: pole at eps = 0")
    available = min(num.order, den.order) - vd
    if k > available:
        raise TruncationTooShort(f"need eps^{k} of the quotient, only {available} available")
    q = EpsSeries._raw(num.coeffs[vd: vd + k + 1]) / EpsSeries._raw(den.coeffs[vd: vd + k + 1])
    return q.coeffs[k]
