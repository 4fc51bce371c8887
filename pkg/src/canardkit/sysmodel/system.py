"""Singularly perturbed planar systems ``eps x' = f``, ``y' = g``."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from canardkit.errors import (
    DegenerateFastEquation,
    ModelError,
    NoFold,
    NotAffineInY,
    ParameterDependentCriticalManifold,
)
from canardkit.algebra import EPS, MU, U, X, Y, Polynomial, Rational, RationalFunction, poly_gcd
from canardkit.sysmodel.parser import parse_expression

_ZERO = Polynomial()


@dataclass(frozen=True)
class SPSystem:
    """Fast/slow pair in slow time: ``eps*dx/dt = f``, ``dy/dt = g``.

    ``F0`` optionally carries a user-supplied critical-manifold graph for
    systems that are not affine in ``y``.
    """

    f: Polynomial
    g: Polynomial
    name: str = "system"
    F0: RationalFunction | None = None
    affine_in_y: bool = field(init=False)

    def __post_init__(self):
        if self.f.depends_on(U) or self.g.depends_on(U):
            raise ModelError("f and g must not contain the transient unknown u")
        object.__setattr__(self, "affine_in_y", self.f.degree(Y) <= 1)

    def to_dict(self) -> dict:
        d = {"name": self.name, "f": str(self.f), "g": str(self.g)}
        if self.F0 is not None:
            d["F0"] = str(self.F0.as_polynomial()) if self.F0.is_polynomial() else str(self.F0)
        return d


@dataclass(frozen=True)
class CriticalManifold:
    F0: RationalFunction
    note: str = ""

    def derivative(self) -> RationalFunction:
        return self.F0.diff(X)


@dataclass(frozen=True)
class FoldPoint:
    """Fold location; ``x0``/``y0`` are ``Rational`` when ``exact`` else floats."""

    x0: object
    y0: object
    exact: bool = True

    def __float__(self) -> float:
        return float(self.x0)


def parse_system(text: str, name: str = "system") -> SPSystem:
    """Build a system from source text.

    Accepts either a JSON object with ``f``, ``g`` (and optional ``name``,
    ``F0``) or two ``f = ...`` / ``g = ...`` lines.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        return system_from_dict(json.loads(stripped))
    exprs = {}
    for line in stripped.splitlines():
        if not line.strip():
            continue
        lhs, sep, rhs = line.partition("=")
        if not sep:
            raise ModelError(f"expected 'name = expression', got {line!r}")
        exprs[lhs.strip()] = rhs
    missing = {"f", "g"} - set(exprs)
    if missing:
        raise ModelError(f"missing definitions: {sorted(missing)}")
    d = {"name": name, "f": exprs["f"], "g": exprs["g"]}
    if "F0" in exprs:
        d["F0"] = exprs["F0"]
    return system_from_dict(d)


def system_from_dict(d: Mapping) -> SPSystem:
    try:
        f = parse_expression(d["f"])
        g = parse_expression(d["g"])
    except KeyError as exc:
        raise ModelError(f"system definition lacks field {exc.args[0]!r}") from None
    F0 = None
    if d.get("F0") is not None:
        F0 = RationalFunction(parse_expression(d["F0"]))
    return SPSystem(f, g, str(d.get("name", "system")), F0)


def load_system(source: str) -> SPSystem:
    """``"vdp"`` or a path to a JSON system file."""
    if source == "vdp":
        return vdp()
    return parse_system(Path(source).read_text(encoding="utf-8"))


def vdp() -> SPSystem:
    """Van der Pol with constant forcing: f = x + y - x^3/3, g = mu - x."""
    return SPSystem(parse_expression("x + y - x^3/3"), parse_expression("mu - x"), "vdp")


def fast_time_field(s: SPSystem) -> tuple[Polynomial, Polynomial]:
    """The fast-time field (f, eps*g); same orbits as the slow-time system for eps > 0."""
    return s.f, Polynomial.var(EPS) * s.g


def critical_manifold(s: SPSystem) -> CriticalManifold:
    f0 = s.f.subs(EPS, 0)
    if s.F0 is not None:
        F0 = s.F0
        residual = RationalFunction(f0).subs(Y, F0)
        if residual:
            raise ModelError(f"supplied F0 does not solve f(x, F0, mu, 0) = 0; residual {residual}")
        note = "user-supplied graph, verified"
    else:
        if not s.affine_in_y:
            raise NotAffineInY("f is not affine in y; supply F0 in the system file")
        parts = f0.coefficients_in(Y)
        a = parts.get(1, _ZERO)
        b = parts.get(0, _ZERO)
        if not a:
            raise DegenerateFastEquation("coefficient of y in f vanishes identically at eps = 0")
        F0 = RationalFunction(-b, a)
        note = "graph y = -b/a of the affine fast equation a*y + b = 0"
    if F0.depends_on(MU):
        raise ParameterDependentCriticalManifold("critical manifold depends on mu at order eps^0")
    fmu = RationalFunction(s.f.diff(MU).subs(EPS, 0)).subs(Y, F0)
    if fmu:
        raise ParameterDependentCriticalManifold("df/dmu does not vanish on the critical manifold")
    return CriticalManifold(F0, note)


# -- fold points -------------------------------------------------------------

def _as_int_coeffs(p: Polynomial) -> list[int]:
    """Dense integer coefficients (highest degree first) of a univariate-in-x polynomial."""
    p = p.primitive()[1]
    parts = p.coefficients_in(X)
    n = max(parts)
    return [int(parts[k].constant_value()) if k in parts else 0 for k in range(n, -1, -1)]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, int(n ** 0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _rational_roots(p: Polynomial) -> list[Rational]:
    coeffs = _as_int_coeffs(p)
    roots = []
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        roots.append(Rational(0))
    if len(coeffs) <= 1:
        return sorted(set(roots))
    lead, const = coeffs[0], coeffs[-1]
    for q in _divisors(lead):
        for pnum in _divisors(const):
            for sign in (1, -1):
                r = Rational(sign * pnum, q)
                if p.evaluate({X: r}) == 0:
                    roots.append(r)
    return sorted(set(roots))


def _sturm_count(seq: list[Polynomial], a: Rational, b: Rational) -> int:
    def changes(t):
        vals = [s.evaluate({X: t}) for s in seq]
        vals = [v for v in vals if v != 0]
        return sum(1 for v, w in zip(vals, vals[1:]) if (v > 0) != (w > 0))
    return changes(a) - changes(b)


def _sturm_sequence(p: Polynomial) -> list[Polynomial]:
    seq = [p, p.diff(X)]
    while True:
        _, r = seq[-2].divmod(seq[-1])
        if not r:
            break
        seq.append(-r)
    return seq


def _real_roots_squarefree(p: Polynomial, tol: float) -> list[float]:
    """Isolate (Sturm) then bisect the real roots of a square-free univariate polynomial."""
    coeffs = _as_int_coeffs(p)
    if len(coeffs) <= 1:
        return []
    bound = 1 + max(Fraction(abs(c), abs(coeffs[0])) for c in coeffs[1:])
    seq = _sturm_sequence(p)
    intervals = [(Rational(-bound.numerator, bound.denominator), Rational(bound.numerator, bound.denominator))]
    isolated = []
    while intervals:
        a, b = intervals.pop()
        n = _sturm_count(seq, a, b)
        if n == 0:
            continue
        if n == 1:
            isolated.append((a, b))
            continue
        m = (a + b) / 2
        if p.evaluate({X: m}) == 0:
            m = m + (b - a) / 7
        intervals.extend([(a, m), (m, b)])
    roots = []
    for a, b in isolated:
        fa = p.evaluate({X: a})
        if fa == 0:
            roots.append(float(a))
            continue
        while b - a > tol / 4:
            m = (a + b) / 2
            fm = p.evaluate({X: m})
            if fm == 0:
                a = b = m
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        roots.append(float((a + b) / 2))
    return sorted(roots)


def fold_points(m: CriticalManifold, tol: float = 1e-12) -> list[FoldPoint]:
    """All real roots of F0'(x) = 0, rational ones exactly."""
    if not m.F0.is_polynomial():
        raise ModelError("fold search requires a polynomial critical manifold")
    F0 = m.F0.as_polynomial()
    if set(F0.variables()) - {X}:
        raise ModelError("critical manifold must depend on x only")
    d = F0.diff(X)
    if d.is_constant():
        raise NoFold("F0' is constant")
    g = poly_gcd(d, d.diff(X))
    sqfree = d.exact_div(g) if not g.is_constant() else d
    exact = _rational_roots(sqfree)
    rest = sqfree
    xp = Polynomial.var(X)
    for r in exact:
        rest = rest.exact_div(xp - r)
    folds = [FoldPoint(r, F0.evaluate({X: r}), True) for r in exact]
    for r in _real_roots_squarefree(rest, tol) if rest.total_degree() > 0 else []:
        folds.append(FoldPoint(r, F0.evaluate_float({X: r}), False))
    if not folds:
        raise NoFold("F0' has no real root")
    return sorted(folds, key=lambda fp: float(fp.x0))


def select_fold(folds: list[FoldPoint], selector=None) -> FoldPoint:
    """Pick a fold: the largest x0 by default, else the one nearest ``selector``."""
    if selector is None:
        return max(folds, key=lambda fp: float(fp.x0))
    target = float(Fraction(str(selector)))
    best = min(folds, key=lambda fp: abs(float(fp.x0) - target))
    if abs(float(best.x0) - target) > 1e-9:
        raise ModelError(f"no fold at x0 = {selector}; folds are {[str(fp.x0) for fp in folds]}")
    return best
