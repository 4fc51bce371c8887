"""Order-by-order canard expansion from the invariance equation.

The slow manifold is sought as a graph ``y = F(x, eps) = sum F_k(x) eps^k``
together with the parameter series ``mu(eps) = sum mu_k eps^k``.  Graph
invariance under ``eps x' = f``, ``y' = g`` reads

    dF/dx * f(x, F, mu(eps), eps) - eps * g(x, F, mu(eps), eps) = 0.

At order ``eps^k`` the unknown ``F_k`` enters only through
``F0' * df/dy * F_k``, so ``F_k`` is a quotient with ``F0'`` in its
denominator.  ``F0'`` vanishes at the fold; the not-yet-fixed ``mu_{k-1}``
(carried as the ring variable ``u``) is chosen to make the numerator
vanish there too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from canardkit.errors import (
    ModelError,
    NonlinearParameterEntry,
    ParameterUnsolvable,
    UnremovableSingularity,
)
from canardkit.algebra import (
    EPS, MU, U, X, Y,
    EpsSeries, Polynomial, Rational, RationalFunction,
    rational_str, substitute_series, to_rational,
)
from canardkit.sysmodel import FoldPoint, SPSystem, critical_manifold, fold_points, select_fold
from canardkit.sysmodel.parser import parse_expression

_EPS = Polynomial.var(EPS)
_U = Polynomial.var(U)


@dataclass(frozen=True)
class CanardExpansion:
    """F_0..F_N (exact rational functions of x) and mu_0..mu_{N-1}."""

    order: int
    F: tuple
    mu: tuple
    fold: FoldPoint | None
    method: str = "gspm"
    system: str = ""

    def mu_value(self, eps: float, order: int | None = None) -> float:
        return mu_series_eval(self, eps, order)

    def to_dict(self) -> dict:
        d = {
            "method": self.method,
            "order": self.order,
            "mu": [rational_str(m) for m in self.mu],
            "F": [Fk.to_json() for Fk in self.F],
        }
        if self.fold is not None:
            d["fold"] = rational_str(self.fold.x0) if self.fold.exact else repr(float(self.fold.x0))
        if self.system:
            d["system"] = self.system
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "CanardExpansion":
        F = tuple(RationalFunction(parse_expression(t["num"]), parse_expression(t["den"])) for t in d["F"])
        mu = tuple(to_rational(m) for m in d["mu"])
        fold = None
        if "fold" in d:
            x0 = to_rational(d["fold"]) if "." not in str(d["fold"]) else float(d["fold"])
            exact = not isinstance(x0, float)
            y0 = F[0].evaluate({X: x0}) if exact else F[0].evaluate_float({X: x0})
            fold = FoldPoint(x0, y0, exact)
        return cls(int(d["order"]), F, mu, fold, d.get("method", "gspm"), d.get("system", ""))


@dataclass(frozen=True)
class InvarianceResidual:
    series: EpsSeries
    verified_order: int

    @property
    def order(self) -> int:
        return self.series.order


def mu_polynomial(mu: Sequence, unknown_at: int | None = None) -> Polynomial:
    """``sum mu_k eps^k`` (plus ``u * eps^unknown_at``) as a polynomial in eps, u."""
    p = Polynomial()
    for k, m in enumerate(mu):
        p = p + _EPS ** k * m
    if unknown_at is not None:
        p = p + _U * _EPS ** unknown_at
    return p


def graph_series(F: Sequence[RationalFunction], order: int) -> EpsSeries:
    cs = list(F[: order + 1]) + [0] * max(0, order + 1 - len(F))
    return EpsSeries(cs)


def invariance_series(f: Polynomial, g: Polynomial, F: EpsSeries) -> EpsSeries:
    """dF/dx * f(x, F, eps) - eps * g(x, F, eps), with mu already substituted in f and g."""
    order = F.order
    fs = substitute_series(f, Y, F, order)
    gs = substitute_series(g, Y, F, order)
    return F.diff(X) * fs - gs.shift_up(1)


def _check_fold(fold: FoldPoint) -> Rational:
    if not fold.exact:
        raise ModelError("pole cancellation needs an exact (rational) fold point")
    return to_rational(fold.x0)


def solve_parameter(Fk: RationalFunction, x0: Rational, k: int) -> tuple[Rational, RationalFunction]:
    """Fix ``u`` so that ``Fk`` is finite at ``x0``; returns (u*, Fk with u = u*)."""
    if Fk.den.depends_on(U):
        raise NonlinearParameterEntry(f"order {k}: the unknown mu_{k - 1} enters the denominator")
    if Fk.num.degree(U) > 1:
        raise NonlinearParameterEntry(f"order {k}: the relation is not affine in mu_{k - 1}")
    if Fk.den.evaluate({X: x0}) != 0:
        raise ParameterUnsolvable(f"order {k}: F_{k} has no pole at the fold, mu_{k - 1} is not determined")
    at_fold = Fk.num.subs(X, Polynomial.constant(x0)).coefficients_in(U)
    a = at_fold.get(1, Polynomial()).constant_term()
    b = at_fold.get(0, Polynomial()).constant_term()
    if not a:
        raise UnremovableSingularity(f"order {k}: mu_{k - 1} does not reach the numerator at the fold")
    u_star = -b / a
    fixed = Fk.subs(U, Polynomial.constant(u_star))
    if fixed.den.evaluate({X: x0}) == 0:
        raise UnremovableSingularity(f"order {k}: F_{k} keeps a pole at the fold after fixing mu_{k - 1}")
    return u_star, fixed


def _check_parameter_entry(s: SPSystem, F0: RationalFunction, x0: Rational) -> None:
    gmu = RationalFunction(s.g.diff(MU).subs(EPS, 0)).subs(Y, F0)
    gmu = gmu.subs(X, Polynomial.constant(x0))
    if not gmu:
        raise ParameterUnsolvable("dg/dmu vanishes at the fold: mu_0 cannot be fixed")


def order_step(s: SPSystem, F: Sequence[RationalFunction], mu: Sequence[Rational], k: int) -> RationalFunction:
    """F_k with mu_{k-1} still free (as the variable u)."""
    mp = mu_polynomial(mu, k - 1)
    f = s.f.subs(MU, mp)
    g = s.g.subs(MU, mp)
    series = graph_series(F, k)  # slot k holds 0
    R = invariance_series(f, g, series)
    F0p = F[0].diff(X)
    fy = RationalFunction(f.diff(Y).subs(EPS, 0)).subs(Y, F[0])
    return -(R[k] / (F0p * fy))


def expand_canard(s: SPSystem, N: int, fold: FoldPoint | None = None) -> CanardExpansion:
    """F_0..F_N and mu_0..mu_{N-1} by symbolic order-by-order solution."""
    if N < 1:
        raise ValueError("expansion order must be at least 1")
    cm = critical_manifold(s)
    if fold is None:
        fold = select_fold(fold_points(cm))
    x0 = _check_fold(fold)
    F0 = cm.F0
    if not F0.diff(X):
        raise ModelError("F0' vanishes identically")
    fy = RationalFunction(s.f.diff(Y).subs(EPS, 0)).subs(Y, F0)
    if not fy:
        raise ModelError("df/dy vanishes identically on the critical manifold")
    _check_parameter_entry(s, F0, x0)
    F = [F0]
    mu: list = []
    for k in range(1, N + 1):
        raw = order_step(s, F, mu, k)
        u_star, Fk = solve_parameter(raw, x0, k)
        mu.append(u_star)
        F.append(Fk)
    return CanardExpansion(N, tuple(F), tuple(mu), fold, "gspm", s.name)


def mu_series_eval(e: CanardExpansion, eps: float, order: int | None = None) -> float:
    """Horner evaluation of mu_0 + mu_1 eps + ... + mu_order eps^order in double precision."""
    coeffs = e.mu if order is None else e.mu[: order + 1]
    if order is not None and len(coeffs) < order + 1:
        raise ValueError(f"expansion carries mu_0..mu_{len(e.mu) - 1}, order {order} requested")
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * eps + float(c)
    return acc


def invariance_residual(s: SPSystem, e: CanardExpansion) -> InvarianceResidual:
    """Residual of the invariance equation through eps^(N+1).

    With an empty ``mu`` list the parameter stays symbolic.
    """
    order = len(e.F)
    mp = mu_polynomial(e.mu) if e.mu else Polynomial.var(MU)
    f = s.f.subs(MU, mp)
    g = s.g.subs(MU, mp)
    R = invariance_series(f, g, graph_series(e.F, order))
    verified = -1
    for c in R:
        if c:
            break
        verified += 1
    return InvarianceResidual(R, verified)
