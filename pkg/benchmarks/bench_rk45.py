"""Compiled vs pure-Python Dormand-Prince kernel on the stiff Van der Pol cycle.

    python3 benchmarks/bench_rk45.py [--eps 0.01] [--tend 20] [--repeat 3]
"""

import argparse
import time

import numpy as np

from canardkit.numerics import NumericSystem
from canardkit.numerics._kernel import integrate_c, integrate_py
from canardkit.sysmodel import vdp


def run(kernel, ns, tend, tol):
    fc, fx, fy = ns._f
    gc, gx, gy = ns._g
    return kernel(fc, fx, fy, gc, gx, gy, 1.0 / ns.eps, 2.0, 0.0, 0.0, tend, tol, tol, 0.0, 1e-14, 10**8, 0.0)


def best_of(kernel, ns, tend, tol, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = run(kernel, ns, tend, tol)
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, default=0.01)
    ap.add_argument("--mu", type=float, default=0.9)
    ap.add_argument("--tend", type=float, default=20.0)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    ns = NumericSystem.from_system(vdp(), a.mu, a.eps)
    tp, op = best_of(integrate_py, ns, a.tend, a.tol, a.repeat)
    print(f"python   {tp:9.4f} s  steps {op[4]:>8d} accepted {op[5]:>6d} rejected")
    if integrate_c is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")
        return
    tc, oc = best_of(integrate_c, ns, a.tend, a.tol, a.repeat)
    print(f"compiled {tc:9.4f} s  steps {oc[4]:>8d} accepted {oc[5]:>6d} rejected")
    diff = np.max(np.abs(op[2] - oc[2])) if len(op[2]) == len(oc[2]) else float("nan")
    print(f"speedup  {tp / tc:9.1f}x  max |x_py - x_c| = {diff:.3g}")


if __name__ == "__main__":
    main()
