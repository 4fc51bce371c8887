"""``canardkit`` command line.

Exit codes: 0 ok, 1 a check failed, 2 model/solver error, 3 numeric error,
64 usage error.  Every error path writes a JSON object with a ``code``
field to standard error.
"""

from __future__ import annotations

import argparse
import json
import platform
import random
import sys
from pathlib import Path

import numpy as np

from canardkit import __version__
from canardkit.errors import CanardKitError, NumericError
from canardkit.algebra import EPS, MU, X, Y, Polynomial
from canardkit.algebra.rational import BACKEND
from canardkit.sysmodel import critical_manifold, fold_points, load_system, select_fold
from canardkit.gspm import CanardExpansion, expand_canard, invariance_residual, mu_series_eval
from canardkit.fcm import cross_validate, darboux_check, fcm_expand, jets
from canardkit import numerics as nm

EXIT_OK, EXIT_CHECK, EXIT_SOLVER, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers ------------------------------------------------------------------

def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers")
    return float(parts[0]), float(parts[1])


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _check_tol(tol: float) -> None:
    if not 1e-13 <= tol <= 1e-6:
        raise UsageError("--tol must lie in [1e-13, 1e-6]")


def _check_eps(eps: float, allow_zero: bool = False) -> None:
    if eps < 0 or (eps == 0 and not allow_zero):
        raise UsageError("--eps must be positive")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _metadata(command: str, **fields) -> dict:
    meta = {
        "command": command,
        "kernel": nm.KERNEL,
        "versions": {
            "canardkit": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "rational_backend": BACKEND,
        },
        "integrator": {"method": "dormand-prince 5(4)", "hmin": nm.HMIN},
        "time_unit": "slow time t; fast time is t/eps",
    }
    meta.update(fields)
    return meta


def _write_sidecar(out: str | None, meta: dict, default: str | None = None) -> None:
    target = default if out is None else out + ".meta.json"
    if target is None:
        return
    Path(target).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _expansion(args, order: int) -> CanardExpansion:
    s = load_system(args.system)
    folds = fold_points(critical_manifold(s))
    fold = select_fold(folds, args.fold)
    if args.method == "fcm":
        return fcm_expand(s, order, fold).expansion
    return expand_canard(s, order, fold)


# -- commands ------------------------------------------------------------------

def cmd_expand(args) -> int:
    e = _expansion(args, args.order)
    _emit(e.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_mu(args) -> int:
    _check_eps(args.eps, allow_zero=True)
    # mu_k is fixed at expansion order k + 1
    e = _expansion(args, args.order + 1)
    print(f"{mu_series_eval(e, args.eps, args.order):.17g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    _check_eps(args.eps)
    _check_tol(args.tol)
    if args.tend <= 0:
        raise UsageError("--tend must be positive")
    s = load_system(args.system)
    ns = nm.NumericSystem.from_system(s, args.mu, args.eps)
    start = args.start if args.start is not None else nm.default_start(args.mu)
    traj = nm.integrate(ns, start, args.tend, args.tol, record_from=args.record_from)
    _emit(nm.trajectory_csv(traj), args.out)
    meta = _metadata("simulate", system=s.name, mu=args.mu, eps=args.eps, start=list(start),
                     t_end=args.tend, record_from=args.record_from, tol=args.tol,
                     accepted_steps=traj.accepted, rejected_steps=traj.rejected, samples=len(traj))
    _write_sidecar(args.out, meta, args.meta)
    return EXIT_OK


def cmd_sweep(args) -> int:
    _check_eps(args.eps)
    _check_tol(args.tol)
    mus = list(args.mu or [])
    if args.mu_range is not None:
        lo, hi, n = args.mu_range
        n = int(n)
        if n < 1:
            raise UsageError("--mu-range count must be at least 1")
        mus.extend(np.linspace(lo, hi, n).tolist() if n > 1 else [lo])
    s = load_system(args.system)
    rows = nm.sweep(args.eps, mus, system=s, threshold=args.threshold, tol=args.tol, transient=args.transient)
    _emit(nm.sweep_csv(rows), args.out)
    meta = _metadata("sweep", system=s.name, eps=args.eps, mu=mus, tol=args.tol, transient=args.transient,
                     threshold=args.threshold, start="(2, 0) for mu >= 0, else (-2, 0)")
    _write_sidecar(args.out, meta, args.meta)
    return EXIT_OK


def cmd_explode(args) -> int:
    _check_eps(args.eps)
    _check_tol(args.tol)
    s = load_system(args.system)
    lo, hi = args.bracket
    r = nm.locate_explosion(args.eps, lo, hi, args.threshold, args.resolution, system=s,
                            tol=args.tol, transient=args.transient)
    print(f"{r.mu_star:.17g}")
    meta = _metadata("explode", system=s.name, eps=args.eps, bracket_requested=[lo, hi],
                     threshold=args.threshold, resolution=args.resolution, tol=args.tol,
                     transient=args.transient, start=list(nm.default_start(0.5 * (lo + hi))),
                     mu_star=r.mu_star, bracket=list(r.bracket), bracket_width=r.bracket_width,
                     amplitude_below=r.amplitude_below, amplitude_above=r.amplitude_above, probes=r.probes)
    if args.out is not None:
        Path(args.out).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


FIGURE_MU = (0.99, 0.99874045, 0.998740451, 1.05)


def cmd_figure(args) -> int:
    """Trajectories across the explosion, the critical manifold, and their classification."""
    _check_eps(args.eps)
    _check_tol(args.tol)
    s = load_system(args.system)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, m in enumerate(args.mu):
        ns = nm.NumericSystem.from_system(s, m, args.eps)
        traj = nm.integrate(ns, nm.default_start(m), args.tend, args.tol)
        name = f"trajectory_{i}.csv"
        (outdir / name).write_text(nm.trajectory_csv(traj), encoding="utf-8")
        files.append({"mu": m, "file": name, "samples": len(traj)})
    F0 = critical_manifold(s).F0
    lines = ["x,y"]
    for xv in np.linspace(-args.xmax, args.xmax, args.samples):
        try:
            yv = F0.evaluate_float({X: float(xv)})
        except ZeroDivisionError:
            continue
        lines.append(f"{nm.fmt(float(xv))},{nm.fmt(yv)}")
    (outdir / "critical_manifold.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    rows = nm.sweep(args.eps, list(args.mu), system=s, tol=args.tol, transient=args.transient)
    (outdir / "classification.csv").write_text(nm.sweep_csv(rows), encoding="utf-8")
    meta = _metadata("figure", system=s.name, eps=args.eps, mu=list(args.mu), tol=args.tol, t_end=args.tend,
                     transient=args.transient, trajectories=files,
                     start="(2, 0) for mu >= 0, else (-2, 0)")
    (outdir / "figure.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                             encoding="utf-8")
    for r in rows:
        print(f"{nm.fmt(r.mu)} {r.classification}")
    return EXIT_OK


# -- check ------------------------------------------------------------------

def _symbolic_checks(args, report) -> None:
    s = load_system(args.system)
    order = args.order
    g = expand_canard(s, order)
    f = fcm_expand(s, order).expansion
    cv = cross_validate(g, f)
    report("gspm_equals_fcm", cv.equal, f"through order {cv.compared_order}" if cv.equal
           else f"first divergence at {cv.first_divergence}")
    for n in range(1, order + 1):
        res = invariance_residual(s, expand_canard(s, n))
        report(f"invariance_order_{n}", res.verified_order >= n, f"zero through eps^{res.verified_order}")
    if args.expansion is not None:
        d = json.loads(Path(args.expansion).read_text(encoding="utf-8"))
        loaded = CanardExpansion.from_dict(d)
        reference = f if loaded.method == "fcm" else g
        if loaded.order > reference.order:
            reference = (fcm_expand(s, loaded.order).expansion if loaded.method == "fcm"
                         else expand_canard(s, loaded.order))
        cmp = cross_validate(loaded, reference)
        same_mu = len(loaded.mu) == loaded.order and cmp.equal
        report("expansion_file_matches", same_mu,
               "equal" if same_mu else f"first divergence at {cmp.first_divergence}")
    x, y = Polynomial.var(X), Polynomial.var(Y)
    field = (x, 2 * y)
    inv = darboux_check(y - x ** 2, field)
    report("darboux_invariant", inv.exact and inv.cofactor == Polynomial.constant(2), f"cofactor {inv.cofactor}")
    non = darboux_check(y - x, field)
    report("darboux_non_invariant", not non.exact, f"remainder {non.remainder}")


def _numeric_checks(args, report) -> None:
    s = load_system(args.system)
    e = expand_canard(s, 4)
    series = mu_series_eval(e, args.eps, 3)
    r = nm.locate_explosion(args.eps, series - 0.01, series + 0.01, system=s)
    report("series_vs_bisection", abs(r.mu_star - series) <= 5e-4 and r.bracket_width <= 1e-6,
           f"mu_star {r.mu_star:.12g}, series {series:.12g}")
    folds = fold_points(critical_manifold(s))
    if len(folds) > 1:
        other = min(folds, key=lambda fp: float(fp.x0))
        e2 = expand_canard(s, 3, other)
        negated = all(a == -b for a, b in zip(e.mu, e2.mu))
        m = nm.locate_explosion(args.eps, -series - 0.01, -series + 0.01, system=s)
        report("mirror_symmetry", negated and abs(m.mu_star + r.mu_star) <= 1e-6,
               f"mu_star {m.mu_star:.12g} vs {r.mu_star:.12g}")
    # jets against centred differences on random trajectories (seeded)
    rng = random.Random(args.seed)
    P, Q = jets(s, 2)[0]
    Pd, Qd = jets(s, 2)[1]
    worst = 0.0
    for _ in range(5):
        mu = rng.uniform(0.5, 1.5)
        ns = nm.NumericSystem.from_system(s, mu, args.eps)
        start = (rng.uniform(-2, 2), rng.uniform(-1, 1))
        tr = nm.integrate(ns, start, 0.05, 1e-12)
        i = len(tr) // 2
        pt = {X: float(tr.x[i]), Y: float(tr.y[i])}
        worst = max(worst, _jet_error(P, Q, Pd, Qd, s, mu, args.eps, pt))
    report("jets_vs_finite_differences", worst <= 1e-5, f"worst relative error {worst:.3g}")


def _jet_error(P, Q, Pd, Qd, s, mu, eps, pt) -> float:
    """Relative error of the second jet against a centred difference of the first."""
    env = {MU: mu, EPS: eps}
    x0, y0 = pt[X], pt[Y]

    def first(a, b):
        d = {**env, X: a, Y: b}
        return np.array([P.evaluate_float(d), Q.evaluate_float(d)])

    v = first(x0, y0)
    h = 1e-6 / max(1.0, float(np.linalg.norm(v)))
    fp, fm = first(x0 + h * v[0], y0 + h * v[1]), first(x0 - h * v[0], y0 - h * v[1])
    fd = (fp - fm) / (2 * h)
    d = {**env, X: x0, Y: y0}
    sym = np.array([Pd.evaluate_float(d), Qd.evaluate_float(d)])
    return float(np.linalg.norm(sym - fd) / max(np.linalg.norm(sym), 1e-300))


def cmd_check(args) -> int:
    _check_eps(args.eps)
    results = []

    def report(name: str, ok: bool, detail: str = "") -> None:
        results.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))

    _symbolic_checks(args, report)
    if not args.skip_numeric:
        _numeric_checks(args, report)
    return EXIT_OK if all(results) else EXIT_CHECK


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="canardkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"canardkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_opts(q, method=True):
        q.add_argument("--system", default="vdp", help='"vdp" or a JSON/text system file')
        q.add_argument("--fold", default=None, help="fold abscissa to expand at (default: largest)")
        if method:
            q.add_argument("--method", choices=("gspm", "fcm"), default="gspm")

    q = sub.add_parser("expand", help="exact slow-manifold and parameter series")
    system_opts(q)
    q.add_argument("--order", type=_positive_int, required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_expand)

    q = sub.add_parser("mu", help="evaluate the parameter series at a given eps")
    system_opts(q)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--order", type=_nonneg_int, default=3, help="highest eps power kept")
    q.set_defaults(func=cmd_mu)

    def numeric_opts(q):
        q.add_argument("--system", default="vdp")
        q.add_argument("--eps", type=float, required=True)
        q.add_argument("--tol", type=float, default=nm.DEFAULT_TOL)
        q.add_argument("--out", default=None)

    q = sub.add_parser("simulate", help="trajectory CSV at fixed mu and eps")
    numeric_opts(q)
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--tend", type=float, default=30.0)
    q.add_argument("--start", type=_pair, default=None, help="x,y (default 2,0 or -2,0 by sign of mu)")
    q.add_argument("--record-from", type=float, default=0.0)
    q.add_argument("--meta", default=None, help="sidecar path when writing CSV to stdout")
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("sweep", help="classified limit cycles over a list of mu")
    numeric_opts(q)
    q.add_argument("--mu", type=_floats, default=None, help="comma-separated values")
    q.add_argument("--mu-range", type=_floats, default=None, help="lo,hi,count")
    q.add_argument("--threshold", type=float, default=nm.DEFAULT_THRESHOLD)
    q.add_argument("--transient", type=float, default=nm.DEFAULT_TRANSIENT)
    q.add_argument("--meta", default=None)
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("explode", help="bisect for the canard explosion")
    numeric_opts(q)
    q.add_argument("--bracket", type=_pair, default=(0.99, 1.01), help="mu_lo,mu_hi")
    q.add_argument("--threshold", type=float, default=nm.DEFAULT_THRESHOLD)
    q.add_argument("--resolution", type=float, default=nm.DEFAULT_RESOLUTION)
    q.add_argument("--transient", type=float, default=nm.DEFAULT_TRANSIENT)
    q.set_defaults(func=cmd_explode)

    q = sub.add_parser("figure", help="data for plotting the transition across the explosion")
    q.add_argument("--system", default="vdp")
    q.add_argument("--eps", type=float, default=0.01)
    q.add_argument("--tol", type=float, default=nm.DEFAULT_TOL)
    q.add_argument("--mu", type=_floats, default=FIGURE_MU)
    q.add_argument("--tend", type=float, default=30.0)
    q.add_argument("--transient", type=float, default=nm.DEFAULT_TRANSIENT)
    q.add_argument("--xmax", type=float, default=2.5, help="critical manifold sampled on [-xmax, xmax]")
    q.add_argument("--samples", type=_positive_int, default=401)
    q.add_argument("--outdir", required=True)
    q.set_defaults(func=cmd_figure)

    q = sub.add_parser("check", help="cross-validation report")
    q.add_argument("--system", default="vdp")
    q.add_argument("--order", type=_positive_int, default=3)
    q.add_argument("--eps", type=float, default=0.01)
    q.add_argument("--expansion", default=None, help="expansion JSON file to verify")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--skip-numeric", action="store_true")
    q.set_defaults(func=cmd_check)
    return p


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "mu_range", None) is not None and len(args.mu_range) != 3:
            raise UsageError("--mu-range expects lo,hi,count")
        return args.func(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, {"code": "usage", "message": str(exc)})
    except NumericError as exc:
        return _fail(EXIT_NUMERIC, exc.to_dict())
    except CanardKitError as exc:
        return _fail(EXIT_SOLVER, exc.to_dict())
    except (OSError, ValueError) as exc:
        return _fail(EXIT_USAGE, {"code": "usage", "message": str(exc)})


if __name__ == "__main__":
    sys.exit(main())
