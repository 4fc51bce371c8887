"""Sparse multivariate polynomials over Q in the fixed ring Q[x, y, mu, eps, u].

Monomials are packed into a single Python int: six 12-bit fields holding
(total degree, x, y, mu, eps, u) from most to least significant.  With
that layout integer comparison *is* graded-lexicographic comparison
(x > y > mu > eps > u) and monomial multiplication is integer addition.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Iterator, Mapping

from canardkit.errors import InexactDivision, PoleAtPoint
from canardkit.algebra.rational import ONE, ZERO, Rational, lcm, rational_str, to_rational

NVARS = 5
VARS = ("x", "y", "mu", "eps", "u")
X, Y, MU, EPS, U = range(NVARS)

_BITS = 12
_MASK = (1 << _BITS) - 1
_DEG_SHIFT = _BITS * NVARS
_DEG_ONE = 1 << _DEG_SHIFT
# top bit of every field; exponents must stay below 2**11
_GUARD = sum(1 << (_BITS * k + _BITS - 1) for k in range(NVARS + 1))
MAX_EXPONENT = (1 << (_BITS - 1)) - 1


def _shift(v: int) -> int:
    return _BITS * (NVARS - 1 - v)


_VAR_UNIT = tuple((1 << _shift(v)) + _DEG_ONE for v in range(NVARS))


def var_index(v) -> int:
    if isinstance(v, int):
        if not 0 <= v < NVARS:
            raise ValueError(f"variable index out of range: {v}")
        return v
    try:
        return VARS.index(v)
    except ValueError:
        raise ValueError(f"unknown variable {v!r}; expected one of {VARS}") from None


# -- monomials -------------------------------------------------------------

def pack(exponents: Iterable[int]) -> int:
    exps = tuple(exponents)
    if len(exps) != NVARS:
        raise ValueError("a monomial has exactly 5 exponents")
    m = 0
    for v, e in enumerate(exps):
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        m |= e << _shift(v)
    return m | (sum(exps) << _DEG_SHIFT)


def unpack(m: int) -> tuple[int, ...]:
    return tuple((m >> _shift(v)) & _MASK for v in range(NVARS))


def exponent(m: int, v: int) -> int:
    return (m >> _shift(v)) & _MASK


def mono_degree(m: int) -> int:
    return m >> _DEG_SHIFT


def mono_divides(b: int, a: int) -> bool:
    """True when monomial ``b`` divides monomial ``a``."""
    return ((a | _GUARD) - b) & _GUARD == _GUARD


def var_power(v: int, k: int) -> int:
    return _VAR_UNIT[v] * k


def mono_str(m: int) -> str:
    parts = []
    for v, e in enumerate(unpack(m)):
        if e == 1:
            parts.append(VARS[v])
        elif e > 1:
            parts.append(f"{VARS[v]}^{e}")
    return "*".join(parts)


# -- polynomials -----------------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps packed monomial -> nonzero coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        if terms:
            self._terms = {m: to_rational(c) for m, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # caller guarantees: Rational coefficients, no zeros
        p = object.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = to_rational(c)
        return cls._raw({0: c} if c else {})

    @classmethod
    def var(cls, v, power: int = 1) -> "Polynomial":
        return cls._raw({var_power(var_index(v), power): ONE})

    @classmethod
    def monomial(cls, exponents: Iterable[int], coeff=1) -> "Polynomial":
        return cls({pack(exponents): coeff})

    @classmethod
    def coerce(cls, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, float):
            raise TypeError("floats are not accepted in exact polynomials")
        return cls.constant(other)

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict:
        return self._terms

    def items(self) -> list[tuple[int, Rational]]:
        """Terms in canonical (descending graded-lex) order."""
        return sorted(self._terms.items(), reverse=True)

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], Rational]]:
        for m, c in self.items():
            yield unpack(m), c

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get(0, ZERO)

    def constant_term(self) -> Rational:
        return self._terms.get(0, ZERO)

    def leading(self) -> tuple[int, Rational]:
        m = max(self._terms)
        return m, self._terms[m]

    def leading_coefficient(self) -> Rational:
        return self._terms[max(self._terms)]

    def total_degree(self) -> int:
        if not self._terms:
            return -1
        return max(self._terms) >> _DEG_SHIFT

    def degree(self, v) -> int:
        v = var_index(v)
        if not self._terms:
            return -1
        s = _shift(v)
        return max((m >> s) & _MASK for m in self._terms)

    def min_degree(self, v) -> int:
        v = var_index(v)
        if not self._terms:
            return -1
        s = _shift(v)
        return min((m >> s) & _MASK for m in self._terms)

    def variables(self) -> tuple[int, ...]:
        seen = 0
        for m in self._terms:
            seen |= m
        return tuple(v for v in range(NVARS) if (seen >> _shift(v)) & _MASK)

    def depends_on(self, v) -> bool:
        s = _shift(var_index(v))
        return any((m >> s) & _MASK for m in self._terms)

    # -- ring operations ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Rational)) or hasattr(other, "denominator"):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __pos__(self) -> "Polynomial":
        return self

    def __add__(self, other) -> "Polynomial":
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Polynomial":
        try:
            other = Polynomial.coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = -c
            else:
                s = s - c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial._raw(out)

    def __rsub__(self, other) -> "Polynomial":
        return Polynomial.coerce(other) - self

    def scale(self, c) -> "Polynomial":
        c = to_rational(c)
        if not c:
            return Polynomial._raw({})
        if c == 1:
            return self
        return Polynomial._raw({m: c * a for m, a in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            if isinstance(other, float):
                return NotImplemented
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        if not b:
            return Polynomial._raw({})
        if len(b) == 1:
            (mb, cb), = b.items()
            if cb == 1:
                return Polynomial._raw({m + mb: c for m, c in a.items()})
            return Polynomial._raw({m + mb: c * cb for m, c in a.items()})
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                s = get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return Polynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return self.exact_div(other)
        c = to_rational(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(1 / c)

    # -- calculus and substitution ----------------------------------------

    def diff(self, v) -> "Polynomial":
        v = var_index(v)
        s = _shift(v)
        unit = _VAR_UNIT[v]
        out = {}
        for m, c in self._terms.items():
            e = (m >> s) & _MASK
            if e:
                out[m - unit] = c * e
        return Polynomial._raw(out)

    def coefficients_in(self, v) -> dict[int, "Polynomial"]:
        """Decompose as ``sum_k c_k * v**k``; returns ``{k: c_k}`` with c_k free of v."""
        v = var_index(v)
        s = _shift(v)
        unit = _VAR_UNIT[v]
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            e = (m >> s) & _MASK
            parts.setdefault(e, {})[m - unit * e] = c
        return {e: Polynomial._raw(t) for e, t in parts.items()}

    @classmethod
    def from_coefficients(cls, v, coeffs: Mapping[int, "Polynomial"]) -> "Polynomial":
        v = var_index(v)
        out: dict = {}
        for k, c in coeffs.items():
            shift = var_power(v, k)
            for m, a in c._terms.items():
                out[m + shift] = a
        return cls._raw(out)

    def subs(self, v, value) -> "Polynomial":
        """Substitute a polynomial (or rational constant) for variable ``v``."""
        v = var_index(v)
        value = Polynomial.coerce(value)
        coeffs = self.coefficients_in(v)
        if not coeffs or (len(coeffs) == 1 and 0 in coeffs):
            return self
        top = max(coeffs)
        result = coeffs.get(top)
        for k in range(top - 1, -1, -1):
            result = result * value
            c = coeffs.get(k)
            if c is not None:
                result = result + c
        return result

    def evaluate(self, point: Mapping) -> Rational:
        """Exact value at a point that fixes every variable present."""
        vals = {var_index(k): to_rational(val) for k, val in point.items()}
        total = ZERO
        for m, c in self._terms.items():
            term = c
            for v, e in enumerate(unpack(m)):
                if e:
                    if v not in vals:
                        raise ValueError(f"no value given for variable {VARS[v]}")
                    term = term * vals[v] ** e
            total += term
        return total

    def partial_evaluate(self, point: Mapping) -> "Polynomial":
        p = self
        for k, val in point.items():
            p = p.subs(k, Polynomial.constant(val))
        return p

    def evaluate_float(self, point: Mapping[int, float]) -> float:
        total = 0.0
        for m, c in self._terms.items():
            term = float(c)
            for v, e in enumerate(unpack(m)):
                if e:
                    term *= point[v] ** e
            total += term
        return total

    # -- content and division ---------------------------------------------

    def content(self) -> Rational:
        """Positive rational c with self/c integer-primitive (gcd of numerators / lcm of denominators)."""
        if not self._terms:
            return ONE
        g = 0
        d = 1
        for c in self._terms.values():
            g = gcd(g, int(c.numerator))
            d = lcm(d, int(c.denominator))
        return Rational(g, d)

    def primitive(self) -> tuple[Rational, "Polynomial"]:
        """Split into (c, p) with p integer-primitive and positive leading coefficient."""
        if not self._terms:
            return ONE, self
        c = self.content()
        if self.leading_coefficient() < 0:
            c = -c
        if c == 1:
            return c, self
        inv = 1 / c
        return c, Polynomial._raw({m: a * inv for m, a in self._terms.items()})

    def monic(self) -> "Polynomial":
        return self.scale(1 / self.leading_coefficient())

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Multivariate division with remainder by a single divisor in graded-lex order.

        Returns (q, r) with self = q*divisor + r and no term of r divisible
        by the leading monomial of divisor.
        """
        if not divisor._terms:
            raise ZeroDivisionError("polynomial division by zero")
        lm, lc = divisor.leading()
        inv = 1 / lc
        rest = [(m, c) for m, c in divisor._terms.items() if m != lm]
        p = dict(self._terms)
        q: dict = {}
        r: dict = {}
        while p:
            m = max(p)
            c = p.pop(m)
            if mono_divides(lm, m):
                qm = m - lm
                qc = c * inv
                q[qm] = qc
                for dm, dc in rest:
                    t = dm + qm
                    s = p.get(t)
                    s = -qc * dc if s is None else s - qc * dc
                    if s:
                        p[t] = s
                    else:
                        p.pop(t, None)
            else:
                r[m] = c
        return Polynomial._raw(q), Polynomial._raw(r)

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        if divisor.is_constant():
            return self / divisor.constant_value()
        q, r = self.divmod(divisor)
        if r:
            raise InexactDivision("polynomial division leaves a remainder")
        return q

    def divides(self, other: "Polynomial") -> bool:
        return not other.divmod(self)[1]

    # -- printing ----------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (m, c) in enumerate(self.items()):
            neg = c < 0
            a = -c if neg else c
            body = mono_str(m)
            if not body:
                tok = rational_str(a)
            elif a == 1:
                tok = body
            else:
                tok = f"{rational_str(a)}*{body}"
            if i == 0:
                out.append(f"-{tok}" if neg else tok)
            else:
                out.append(f" - {tok}" if neg else f" + {tok}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


x = Polynomial.var(X)
y = Polynomial.var(Y)
mu = Polynomial.var(MU)
eps = Polynomial.var(EPS)
u = Polynomial.var(U)


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown polynomial operation {op!r}")


def eval_polynomial(p: Polynomial, point: Mapping) -> Rational:
    try:
        return p.evaluate(point)
    except ZeroDivisionError as exc:  # pragma: no cover - polynomials have no poles
        raise PoleAtPoint(str(exc)) from exc
