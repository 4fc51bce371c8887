"""Pure-Python Dormand-Prince 5(4) stepper, the fallback for ``_dopri_c``.

Status codes: 0 reached ``t_end``, 1 step size fell below ``hmin``,
2 non-finite state, 3 ``max_steps`` exhausted.
"""

from __future__ import annotations

import math

import numpy as np

A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


def _make_rhs(fc, fx, fy, gc, gx, gy, inv_eps):
    fterms = list(zip(map(float, fc), map(int, fx), map(int, fy)))
    gterms = list(zip(map(float, gc), map(int, gx), map(int, gy)))
    maxdeg = max([0] + [max(a, b) for _, a, b in fterms + gterms])
    rng = range(1, maxdeg + 1)

    def rhs(x, y):
        px = [1.0]
        py = [1.0]
        for _ in rng:
            px.append(px[-1] * x)
            py.append(py[-1] * y)
        s = 0.0
        for c, i, j in fterms:
            s += c * px[i] * py[j]
        r = 0.0
        for c, i, j in gterms:
            r += c * px[i] * py[j]
        return s * inv_eps, r

    return rhs


def _err_norm(ex, ey, x, y, xn, yn, rtol, atol):
    sx = atol + rtol * max(abs(x), abs(xn))
    sy = atol + rtol * max(abs(y), abs(yn))
    return math.sqrt(0.5 * ((ex / sx) ** 2 + (ey / sy) ** 2))


def integrate(fc, fx, fy, gc, gx, gy, inv_eps, x0, y0, t0, t_end,
              rtol, atol, h0, hmin, max_steps, t_record):
    rhs = _make_rhs(fc, fx, fy, gc, gx, gy, inv_eps)
    t, x, y = float(t0), float(x0), float(y0)
    ts, xs, ys = [], [], []
    k1x, k1y = rhs(x, y)
    if h0 <= 0.0:
        d0 = _err_norm(x, y, x, y, x, y, rtol, atol)
        d1 = _err_norm(k1x, k1y, x, y, x, y, rtol, atol)
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    else:
        h = h0
    h = min(h, t_end - t0)
    if t >= t_record:
        ts.append(t); xs.append(x); ys.append(y)
    naccept = nreject = steps = 0
    isfinite = math.isfinite
    status = 0 if (isfinite(k1x) and isfinite(k1y)) else 2
    while status == 0 and t < t_end:
        if steps >= max_steps:
            status = 3
            break
        if h < hmin:
            status = 1
            break
        last = t + h >= t_end
        if last:
            h = t_end - t
        k2x, k2y = rhs(x + h * A21 * k1x, y + h * A21 * k1y)
        k3x, k3y = rhs(x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y))
        k4x, k4y = rhs(x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                       y + h * (A41 * k1y + A42 * k2y + A43 * k3y))
        k5x, k5y = rhs(x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                       y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y))
        k6x, k6y = rhs(x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                       y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y))
        xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
        yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
        k7x, k7y = rhs(xn, yn)
        ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
        ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
        err = _err_norm(ex, ey, x, y, xn, yn, rtol, atol)
        steps += 1
        if not (isfinite(xn) and isfinite(yn) and isfinite(err)):
            status = 2
            break
        if err <= 1.0:
            t = t_end if last else t + h
            x, y = xn, yn
            k1x, k1y = k7x, k7y
            naccept += 1
            if t >= t_record:
                ts.append(t); xs.append(x); ys.append(y)
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            h *= min(5.0, max(0.2, fac))
        else:
            nreject += 1
            h *= max(0.2, 0.9 * err ** -0.2)
    return (status, np.array(ts), np.array(xs), np.array(ys), naccept, nreject, h, t, x, y)
