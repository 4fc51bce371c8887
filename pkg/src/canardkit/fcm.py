"""Flow curvature route to the slow manifold and the canard value.

phi_1 = det(X', X'') of the fast-time field (f, eps*g); phi_i is the
(i-1)-th Lie derivative of phi_1.  On the graph y = F(x, eps) of the
zero set of phi_i the implicit-function relations

    dF/dx   = a10 = -(dphi/dx) / (dphi/dy)
    dF/deps = a01 = -(dphi/deps) / (dphi/dy)

hold, so F_n is read off as (1/n) times the eps^(n-1) coefficient of a01
and F_n' as the eps^n coefficient of a10.  The parameter series is
substituted into phi before differentiating in eps, so dphi/deps is the
total derivative along mu(eps).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence, Union

from canardkit.errors import DerivativeMismatch, DivergentLimit, ModelError, SolverError
from canardkit.algebra import (
    EPS, MU, U, X, Y,
    EpsSeries, Polynomial, Rational, RationalFunction,
    series_coefficient_limit, substitute_series,
)
from canardkit.gspm import (
    CanardExpansion,
    _check_fold,
    _check_parameter_entry,
    graph_series,
    mu_polynomial,
    solve_parameter,
)
from canardkit.sysmodel import FoldPoint, SPSystem, critical_manifold, fast_time_field, fold_points, select_fold

Field = Union[SPSystem, Sequence[Polynomial]]

DEFAULT_MAX_PHI = 4
_MAX_RETRIES = 3


def max_phi_index() -> int:
    value = os.environ.get("CANARDKIT_MAX_PHI")
    if value is None:
        return DEFAULT_MAX_PHI
    n = int(value)
    if n < 1:
        raise ValueError("CANARDKIT_MAX_PHI must be a positive integer")
    return n


def _field(v: Field) -> tuple[Polynomial, Polynomial]:
    if isinstance(v, SPSystem):
        return fast_time_field(v)
    P, Q = v
    return Polynomial.coerce(P), Polynomial.coerce(Q)


def lie_derivative(expr, v: Field):
    """V . grad(expr) along the fast-time field (or an explicit pair (P, Q))."""
    P, Q = _field(v)
    if isinstance(expr, RationalFunction):
        return expr.diff(X) * RationalFunction(P) + expr.diff(Y) * RationalFunction(Q)
    expr = Polynomial.coerce(expr)
    return expr.diff(X) * P + expr.diff(Y) * Q


@dataclass(frozen=True)
class JetVector:
    """components[k] = (k+1)-th time derivative of (x, y) along the field."""

    components: tuple

    def __getitem__(self, k: int):
        return self.components[k]

    def __len__(self) -> int:
        return len(self.components)


def jets(v: Field, order: int = 2) -> JetVector:
    P, Q = _field(v)
    comps = [(P, Q)]
    while len(comps) < order:
        a, b = comps[-1]
        comps.append((lie_derivative(a, (P, Q)), lie_derivative(b, (P, Q))))
    return JetVector(tuple(comps))


def determinant(a, b):
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class CurvatureManifold:
    index: int
    phi: Polynomial
    stripped_eps_power: int

    def to_dict(self) -> dict:
        return {"index": self.index, "stripped_eps_power": self.stripped_eps_power, "phi": str(self.phi)}


def normalize_phi(p: Polynomial) -> tuple[Polynomial, int]:
    """Strip the largest eps power dividing p and its rational content."""
    if not p:
        return p, 0
    k = p.min_degree(EPS)
    if k:
        p = Polynomial.from_coefficients(EPS, {e - k: c for e, c in p.coefficients_in(EPS).items()})
    return p.primitive()[1], k


def curvature_chain(s: Field, count: int) -> list[CurvatureManifold]:
    """phi_1 .. phi_count, each normalized."""
    jet = jets(s, 2)
    raw = determinant(jet[0], jet[1])
    phi, k = normalize_phi(raw)
    chain = [CurvatureManifold(1, phi, k)]
    for i in range(2, count + 1):
        phi, k = normalize_phi(lie_derivative(chain[-1].phi, s))
        chain.append(CurvatureManifold(i, phi, k))
    return chain


def curvature_manifold(s: Field, i: int, max_index: int | None = None) -> CurvatureManifold:
    cap = max_phi_index() if max_index is None else max_index
    if i < 1:
        raise ValueError("curvature index starts at 1")
    if i > cap:
        raise ValueError(f"curvature index {i} exceeds the configured maximum {cap}")
    return curvature_chain(s, i)[-1]


# -- Darboux invariance ---------------------------------------------------------

@dataclass(frozen=True)
class DarbouxReport:
    cofactor: Polynomial | None
    remainder: Polynomial
    exact: bool


def darboux_check(phi: Polynomial, v: Field) -> DarbouxReport:
    """Divide L_V phi by phi; a zero remainder means phi = 0 is invariant with that cofactor."""
    if not phi:
        raise ValueError("darboux_check needs a nonzero polynomial")
    L = lie_derivative(phi, v)
    q, r = L.divmod(phi)
    if r:
        return DarbouxReport(None, r, False)
    return DarbouxReport(q, r, True)


# -- extraction of F_n ----------------------------------------------------------

@dataclass(frozen=True)
class FcmStep:
    """Data of one extraction order.

    ``a01`` is (1/n!) lim d^(n-1) a01 / d eps^(n-1) with mu_{n-1} still free
    (as ``u``), i.e. the unfixed F_n; ``a10`` is (1/n!) lim d^n a10 / d eps^n
    after fixing mu_{n-1}, i.e. F_n'.
    """

    n: int
    a10: RationalFunction
    a01: RationalFunction | None
    phi_index_used: int
    truncation: int


@dataclass(frozen=True)
class FcmResult:
    expansion: CanardExpansion
    steps: tuple
    phis: tuple
    F0_prime: RationalFunction
    C0: Rational | None


def _implicit_coefficient(phi: Polynomial, var: int, F: Sequence[RationalFunction], k: int, order: int):
    """eps^k coefficient of -(dphi/dvar)/(dphi/dy) on y = F, retrying longer truncations."""
    last = None
    for attempt in range(_MAX_RETRIES + 1):
        T = order + 2 * attempt
        Fs = graph_series(F, T)
        num = substitute_series(phi.diff(var), Y, Fs, T)
        den = substitute_series(phi.diff(Y), Y, Fs, T)
        try:
            return -series_coefficient_limit(num, den, k), T
        except DivergentLimit as exc:
            # a higher truncation can reveal cancellations hidden by short series
            last = exc
    raise last


def _antiderivative(p: Polynomial) -> Polynomial:
    out = Polynomial()
    for k, c in p.coefficients_in(X).items():
        out = out + c * Polynomial.var(X, k + 1) * Rational(1, k + 1)
    return out


def fcm_expand(s: SPSystem, N: int, fold: FoldPoint | None = None, *, max_index: int | None = None,
               check_derivatives: bool = True) -> FcmResult:
    """F_0..F_N and mu_0..mu_{N-1} from the curvature manifolds phi_1..phi_N."""
    if N < 1:
        raise ValueError("expansion order must be at least 1")
    cap = max_phi_index() if max_index is None else max_index
    if N > cap:
        raise SolverError(f"order {N} needs phi_{N}; the curvature index cap is {cap} (CANARDKIT_MAX_PHI)")
    cm = critical_manifold(s)
    if fold is None:
        fold = select_fold(fold_points(cm))
    x0 = _check_fold(fold)
    if not cm.F0.diff(X):
        raise ModelError("F0' vanishes identically")
    _check_parameter_entry(s, cm.F0, x0)

    chain = curvature_chain(s, N)
    phis = [c.phi for c in chain]

    # order 0: F0' from a10 on the critical manifold, mu still symbolic
    F0p, T0 = _implicit_coefficient(phis[0], X, [cm.F0], 0, 2)
    if F0p.depends_on(MU):
        raise SolverError("lim a10 depends on mu at order 0")
    C0 = None
    if F0p.is_polynomial() and cm.F0.is_polynomial():
        prim = _antiderivative(F0p.as_polynomial())
        C0 = cm.F0.as_polynomial().evaluate({X: 0}) - prim.evaluate({X: 0})
        F0 = RationalFunction(prim + C0)
    else:
        F0 = cm.F0
    if F0.diff(X) != F0p or F0 != cm.F0:
        raise DerivativeMismatch(f"lim a10 = {F0p} does not integrate to the critical manifold {cm.F0}")
    steps = [FcmStep(0, F0p, None, 1, T0)]

    F = [F0]
    mu: list = []
    for n in range(1, N + 1):
        phi = phis[n - 1]
        free = phi.subs(MU, mu_polynomial(mu, n - 1))
        c, T = _implicit_coefficient(free, EPS, F, n - 1, n + 2)
        raw = c.scale(Rational(1, n))
        u_star, Fn = solve_parameter(raw, x0, n)
        mu.append(u_star)
        F.append(Fn)
        Fnp = None
        if check_derivatives:
            fixed = phi.subs(MU, mu_polynomial(mu))
            Fnp, _ = _implicit_coefficient(fixed, X, F, n, n + 2)
            if Fnp != Fn.diff(X):
                raise DerivativeMismatch(f"order {n}: a10 gives F'_{n} = {Fnp}, a01 gives d/dx F_{n} = {Fn.diff(X)}")
        steps.append(FcmStep(n, Fnp, raw, n, T))
    expansion = CanardExpansion(N, tuple(F), tuple(mu), fold, "fcm", s.name)
    return FcmResult(expansion, tuple(steps), tuple(chain), F0p, C0)


# -- comparison -------------------------------------------------------------------

@dataclass(frozen=True)
class CrossValidation:
    equal: bool
    compared_order: int
    first_divergence: tuple | None
    details: list = field(default_factory=list)


def cross_validate(e1: CanardExpansion, e2: CanardExpansion) -> CrossValidation:
    """Exact comparison of F_0..F_m and mu_0..mu_{m-1} with m = min(orders)."""
    m = min(e1.order, e2.order)
    details = []
    first = None
    for k in range(m + 1):
        same = e1.F[k] == e2.F[k]
        details.append((f"F{k}", same))
        if not same and first is None:
            first = ("F", k)
    for k in range(min(m, len(e1.mu), len(e2.mu))):
        same = e1.mu[k] == e2.mu[k]
        details.append((f"mu{k}", same))
        if not same and first is None:
            first = ("mu", k)
    return CrossValidation(first is None, m, first, details)
