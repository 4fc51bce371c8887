"""Double-precision simulation of eps*x' = f, y' = g in slow time.

Integration uses an embedded Dormand-Prince 5(4) pair (compiled when
available); limit cycles are read off successive maxima of x, and the
canard explosion is located by bisection on an amplitude classifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from canardkit.errors import BadBracket, NoOscillation, NonFinite, NumericError, StiffnessFloor
from canardkit.algebra import EPS, MU, X, Y, Polynomial
from canardkit.algebra.polynomial import unpack
from canardkit.sysmodel import SPSystem, vdp
from canardkit.numerics import _kernel

HMIN = 1e-14
DEFAULT_TOL = 1e-10
DEFAULT_TRANSIENT = 20.0
DEFAULT_THRESHOLD = 2.0
DEFAULT_RESOLUTION = 1e-12


def _compile(p: Polynomial, mu: float, eps: float):
    acc: dict = {}
    for m, c in p.terms.items():
        ex, ey, emu, eeps, eu = unpack(m)
        if eu:
            raise ValueError("numeric fields cannot contain u")
        acc[(ex, ey)] = acc.get((ex, ey), 0.0) + float(c) * mu ** emu * eps ** eeps
    keys = sorted(acc)
    return (np.array([acc[k] for k in keys], dtype=np.float64),
            np.array([k[0] for k in keys], dtype=np.int32),
            np.array([k[1] for k in keys], dtype=np.int32))


@dataclass(frozen=True, eq=False)
class NumericSystem:
    """The slow-time field (f/eps, g) at fixed numeric mu and eps."""

    f: Polynomial
    g: Polynomial
    mu: float
    eps: float
    name: str = "system"
    _f: tuple = field(init=False, repr=False)
    _g: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        object.__setattr__(self, "_f", _compile(self.f, self.mu, self.eps))
        object.__setattr__(self, "_g", _compile(self.g, self.mu, self.eps))

    @classmethod
    def from_system(cls, s: SPSystem, mu: float, eps: float) -> "NumericSystem":
        return cls(s.f, s.g, float(mu), float(eps), s.name)

    def rhs(self, x, y):
        """(dx/dt, dy/dt); accepts scalars or numpy arrays."""
        fc, fx, fy = self._f
        gc, gx, gy = self._g
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fv = sum(c * x ** i * y ** j for c, i, j in zip(fc, fx, fy))
        gv = sum(c * x ** i * y ** j for c, i, j in zip(gc, gx, gy))
        return fv / self.eps + 0 * x, gv + 0 * x

    def jacobian(self, x: float, y: float) -> np.ndarray:
        pt = {X: x, Y: y, MU: self.mu, EPS: self.eps}
        rows = []
        for p, scale in ((self.f, 1.0 / self.eps), (self.g, 1.0)):
            rows.append([p.diff(X).evaluate_float(pt) * scale, p.diff(Y).evaluate_float(pt) * scale])
        return np.array(rows)


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    accepted: int
    rejected: int
    tol: float

    def __len__(self) -> int:
        return len(self.t)

    @property
    def end(self) -> tuple[float, float, float]:
        return float(self.t[-1]), float(self.x[-1]), float(self.y[-1])


def integrate(s: NumericSystem, start, t_end: float, tol: float = DEFAULT_TOL, *, t0: float = 0.0,
              record_from: float | None = None, max_steps: int = 50_000_000) -> Trajectory:
    """Adaptive Dormand-Prince integration; one sample per accepted step."""
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    if t_end < t0:
        raise ValueError("t_end precedes t0")
    x0, y0 = map(float, start)
    fc, fx, fy = s._f
    gc, gx, gy = s._g
    status, t, x, y, nacc, nrej, _h, tf, xf, yf = _kernel.integrate(
        fc, fx, fy, gc, gx, gy, 1.0 / s.eps, x0, y0, float(t0), float(t_end),
        tol, tol, 0.0, HMIN, int(max_steps), t0 if record_from is None else float(record_from))
    if status == 1:
        raise StiffnessFloor(f"step size fell below {HMIN} at t = {tf:.17g}")
    if status == 2:
        raise NonFinite(f"state became non-finite near t = {tf:.17g}")
    if status == 3:
        raise NumericError(f"step budget {max_steps} exhausted at t = {tf:.17g}")
    if len(t) == 0 or t[-1] != tf:
        t = np.append(t, tf)
        x = np.append(x, xf)
        y = np.append(y, yf)
    return Trajectory(t, x, y, int(nacc), int(nrej), tol)


# -- limit cycles ------------------------------------------------------------------

@dataclass(frozen=True)
class LimitCycleSummary:
    amplitude_x: float
    period: float
    converged: bool
    x_min: float = math.nan
    x_max: float = math.nan
    periods_observed: int = 0


def _hermite_extrema(t, x, v, rising: bool):
    """Refined extrema of x where dx/dt changes sign (+ to - for maxima)."""
    if rising:
        idx = np.nonzero((v[:-1] > 0) & (v[1:] <= 0))[0]
    else:
        idx = np.nonzero((v[:-1] < 0) & (v[1:] >= 0))[0]
    times, values = [], []
    for i in idx:
        h = t[i + 1] - t[i]
        x0, x1, d0, d1 = x[i], x[i + 1], v[i] * h, v[i + 1] * h
        # cubic Hermite x(s) = a s^3 + b s^2 + c s + x0 on s in [0, 1]
        a = 2 * x0 - 2 * x1 + d0 + d1
        b = -3 * x0 + 3 * x1 - 2 * d0 - d1
        c = d0
        roots = np.roots([3 * a, 2 * b, c]) if abs(a) > 0 or abs(b) > 0 else np.array([])
        s = None
        for r in roots:
            if abs(r.imag) < 1e-12 and -1e-12 <= r.real <= 1 + 1e-12:
                s = min(max(r.real, 0.0), 1.0)
                break
        if s is None:
            s = d0 / (d0 - d1) if d0 != d1 else 0.0
        times.append(t[i] + s * h)
        values.append(((a * s + b) * s + c) * s + x0)
    return np.array(times), np.array(values)


def limit_cycle(s: NumericSystem, transient: float = DEFAULT_TRANSIENT, max_periods: int = 40, *,
                start=(2.0, 0.0), tol: float = DEFAULT_TOL, window: float = 10.0,
                rel_period_tol: float = 1e-6) -> LimitCycleSummary:
    """Amplitude and period of the attractor reached from ``start``.

    ``transient`` is in slow time (``transient/eps`` fast-time units).
    """
    traj = integrate(s, start, transient + window, tol, record_from=transient)
    t, x, y = traj.t, traj.x, traj.y
    while True:
        if float(np.max(x) - np.min(x)) < 1e-6:
            raise NoOscillation(f"orbit settles to an equilibrium (x-range {np.ptp(x):.3g})")
        v = s.rhs(x, y)[0]
        tmax, xmax = _hermite_extrema(t, x, v, True)
        periods = np.diff(tmax)
        converged = (len(periods) >= 2 and
                     abs(periods[-1] - periods[-2]) <= rel_period_tol * abs(periods[-1]))
        if converged or len(periods) >= max_periods:
            break
        t_last, x_last, y_last = traj.end
        extra = window if len(periods) == 0 else max(window, 4 * float(periods[-1]))
        if t_last - transient + extra > max(window, 1.0) * max_periods:
            break
        traj = integrate(s, (x_last, y_last), t_last + extra, tol, t0=t_last)
        t = np.concatenate([t, traj.t[1:]])
        x = np.concatenate([x, traj.x[1:]])
        y = np.concatenate([y, traj.y[1:]])
    if len(tmax) >= 2:
        lo, hi = tmax[-2], tmax[-1]
        tmin, xmin = _hermite_extrema(t, x, v, False)
        inside = (tmin > lo) & (tmin < hi)
        x_hi = float(xmax[-1])
        x_lo = float(np.min(xmin[inside])) if np.any(inside) else float(np.min(x[(t >= lo) & (t <= hi)]))
        return LimitCycleSummary(x_hi - x_lo, float(hi - lo), bool(converged), x_lo, x_hi, len(periods))
    # fewer than two maxima: report the range seen, no period
    return LimitCycleSummary(float(np.ptp(x)), math.nan, False, float(np.min(x)), float(np.max(x)), 0)


def amplitude(s: NumericSystem, **kwargs) -> float:
    """x-amplitude of the attractor, 0 for an equilibrium."""
    try:
        return limit_cycle(s, **kwargs).amplitude_x
    except NoOscillation:
        return 0.0


# -- explosion location ---------------------------------------------------------------

@dataclass(frozen=True)
class ExplosionResult:
    mu_star: float
    bracket: tuple
    bracket_width: float
    amplitude_below: float
    amplitude_above: float
    probes: int
    threshold: float


def default_start(mu: float) -> tuple[float, float]:
    # beyond the attracting branch that feeds the fold on the same side as mu
    return (2.0, 0.0) if mu >= 0 else (-2.0, 0.0)


def locate_explosion(eps: float, mu_lo: float, mu_hi: float, threshold: float = DEFAULT_THRESHOLD,
                     resolution: float = DEFAULT_RESOLUTION, *, system: SPSystem | None = None,
                     tol: float = DEFAULT_TOL, transient: float = DEFAULT_TRANSIENT,
                     start=None) -> ExplosionResult:
    """Bisect on mu for the jump between small and relaxation amplitude.

    Either end may be the relaxation side; ``BadBracket`` when both ends
    classify alike.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not mu_lo < mu_hi:
        raise ValueError("need mu_lo < mu_hi")
    s = system if system is not None else vdp()
    if start is None:
        start = default_start(0.5 * (mu_lo + mu_hi))

    def amp(m: float) -> float:
        return amplitude(NumericSystem.from_system(s, m, eps), transient=transient, start=start, tol=tol)

    a_lo, a_hi = amp(mu_lo), amp(mu_hi)
    big_lo, big_hi = a_lo > threshold, a_hi > threshold
    if big_lo == big_hi:
        side = "relaxation" if big_lo else "small"
        raise BadBracket(f"both ends classify as {side} (amplitudes {a_lo:.6g}, {a_hi:.6g})")
    lo, hi = mu_lo, mu_hi
    probes = 2
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        a = amp(mid)
        probes += 1
        if (a > threshold) == big_lo:
            lo, a_lo = mid, a
        else:
            hi, a_hi = mid, a
    below, above = (a_hi, a_lo) if big_lo else (a_lo, a_hi)
    return ExplosionResult(0.5 * (lo + hi), (lo, hi), hi - lo, below, above, probes, threshold)


# -- sweeps --------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    mu: float
    amplitude_x: float
    period: float
    classification: str


SENSITIVITY_STEP = 1e-7
SENSITIVITY_JUMP = 1e-3


def classify(amplitude_x: float, sensitivity: float = 0.0, threshold: float = DEFAULT_THRESHOLD) -> str:
    """Label a cycle from its amplitude and its amplitude change under a tiny mu shift.

    A cycle whose amplitude moves by more than ``SENSITIVITY_JUMP`` when mu
    moves by ``SENSITIVITY_STEP`` sits inside the explosion window.
    """
    if amplitude_x <= 0.0:
        return "none"
    if sensitivity > SENSITIVITY_JUMP:
        return "canard"
    return "relaxation" if amplitude_x > threshold else "small"


def sweep(eps: float, mu_values, *, system: SPSystem | None = None, threshold: float = DEFAULT_THRESHOLD,
          tol: float = DEFAULT_TOL, transient: float = DEFAULT_TRANSIENT, start=None,
          step: float = SENSITIVITY_STEP) -> list[SweepRow]:
    """Independent limit-cycle runs, one row per mu in input order."""
    s = system if system is not None else vdp()

    def run(m: float):
        st = default_start(m) if start is None else start
        return limit_cycle(NumericSystem.from_system(s, m, eps), transient=transient, start=st, tol=tol)

    rows = []
    for m in mu_values:
        m = float(m)
        try:
            lc = run(m)
        except NoOscillation:
            rows.append(SweepRow(m, 0.0, math.nan, "none"))
            continue
        except NumericError as exc:
            rows.append(SweepRow(m, math.nan, math.nan, f"error:{exc.code}"))
            continue
        sens = 0.0
        for dm in (-step, step):
            try:
                other = run(m + dm).amplitude_x
            except NoOscillation:
                other = 0.0
            except NumericError:
                continue
            sens = max(sens, abs(other - lc.amplitude_x))
        rows.append(SweepRow(m, lc.amplitude_x, lc.period, classify(lc.amplitude_x, sens, threshold)))
    return rows


def equilibrium_eigenvalues(mu: float, eps: float, system: SPSystem | None = None) -> np.ndarray:
    """Jacobian eigenvalues at the equilibrium x = mu on the critical manifold (Van der Pol form)."""
    s = system if system is not None else vdp()
    ns = NumericSystem.from_system(s, mu, eps)
    return np.linalg.eigvals(ns.jacobian(mu, mu ** 3 / 3 - mu))


# -- CSV --------------------------------------------------------------------------

def fmt(v: float) -> str:
    return f"{v:.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    lines = ["t,x,y"]
    lines.extend(f"{fmt(t)},{fmt(x)},{fmt(y)}" for t, x, y in zip(traj.t, traj.x, traj.y))
    return "\n".join(lines) + "\n"


def sweep_csv(rows) -> str:
    lines = ["mu,amplitude_x,period,classification"]
    lines.extend(f"{fmt(r.mu)},{fmt(r.amplitude_x)},{fmt(r.period)},{r.classification}" for r in rows)
    return "\n".join(lines) + "\n"
