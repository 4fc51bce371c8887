# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Dormand-Prince 5(4) stepper for planar polynomial fields.

Same algorithm, constants and return contract as ``_dopri_py.integrate``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, fmax, fmin, pow, isfinite

cnp.import_array()

DEF MAXDEG = 64

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0, B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0, E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef struct Field:
    const double* fc
    const int* fx
    const int* fy
    int nf
    const double* gc
    const int* gx
    const int* gy
    int ng
    int maxdeg
    double inv_eps


cdef inline void rhs(Field* F, double x, double y, double* dx, double* dy) nogil:
    cdef double px[MAXDEG + 1]
    cdef double py[MAXDEG + 1]
    cdef int k
    cdef double s
    px[0] = 1.0
    py[0] = 1.0
    for k in range(1, F.maxdeg + 1):
        px[k] = px[k - 1] * x
        py[k] = py[k - 1] * y
    s = 0.0
    for k in range(F.nf):
        s += F.fc[k] * px[F.fx[k]] * py[F.fy[k]]
    dx[0] = s * F.inv_eps
    s = 0.0
    for k in range(F.ng):
        s += F.gc[k] * px[F.gx[k]] * py[F.gy[k]]
    dy[0] = s


cdef inline double err_norm(double ex, double ey, double x, double y, double xn, double yn,
                            double rtol, double atol) nogil:
    cdef double sx = atol + rtol * fmax(fabs(x), fabs(xn))
    cdef double sy = atol + rtol * fmax(fabs(y), fabs(yn))
    return sqrt(0.5 * ((ex / sx) * (ex / sx) + (ey / sy) * (ey / sy)))


def integrate(double[::1] fc, int[::1] fx, int[::1] fy,
              double[::1] gc, int[::1] gx, int[::1] gy,
              double inv_eps, double x0, double y0, double t0, double t_end,
              double rtol, double atol, double h0, double hmin,
              long max_steps, double t_record):
    cdef Field F
    cdef int maxdeg = 0
    cdef int k
    for k in range(fx.shape[0]):
        maxdeg = max(maxdeg, fx[k], fy[k])
    for k in range(gx.shape[0]):
        maxdeg = max(maxdeg, gx[k], gy[k])
    if maxdeg > MAXDEG:
        raise ValueError("polynomial degree too high for the compiled kernel")
    F.fc = &fc[0] if fc.shape[0] else NULL
    F.fx = &fx[0] if fx.shape[0] else NULL
    F.fy = &fy[0] if fy.shape[0] else NULL
    F.nf = fc.shape[0]
    F.gc = &gc[0] if gc.shape[0] else NULL
    F.gx = &gx[0] if gx.shape[0] else NULL
    F.gy = &gy[0] if gy.shape[0] else NULL
    F.ng = gc.shape[0]
    F.maxdeg = maxdeg
    F.inv_eps = inv_eps

    cdef Py_ssize_t cap = 1024, n = 0
    ts = np.empty(cap)
    xs = np.empty(cap)
    ys = np.empty(cap)
    cdef double[::1] tv = ts, xv = xs, yv = ys

    cdef double t = t0, x = x0, y = y0, h
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, k5x, k5y, k6x, k6y, k7x, k7y
    cdef double xn, yn, ex, ey, err, d0, d1, fac, direction
    cdef long naccept = 0, nreject = 0, steps = 0
    cdef int status = 0
    cdef bint last

    rhs(&F, x, y, &k1x, &k1y)
    if h0 <= 0.0:
        d0 = err_norm(x, y, x, y, x, y, rtol, atol)
        d1 = err_norm(k1x, k1y, x, y, x, y, rtol, atol)
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    else:
        h = h0
    h = fmin(h, t_end - t0)

    if t >= t_record:
        tv[n] = t; xv[n] = x; yv[n] = y; n += 1
    if not (isfinite(k1x) and isfinite(k1y)):
        status = 2

    with nogil:
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
            rhs(&F, x + h * A21 * k1x, y + h * A21 * k1y, &k2x, &k2y)
            rhs(&F, x + h * (A31 * k1x + A32 * k2x), y + h * (A31 * k1y + A32 * k2y), &k3x, &k3y)
            rhs(&F, x + h * (A41 * k1x + A42 * k2x + A43 * k3x),
                y + h * (A41 * k1y + A42 * k2y + A43 * k3y), &k4x, &k4y)
            rhs(&F, x + h * (A51 * k1x + A52 * k2x + A53 * k3x + A54 * k4x),
                y + h * (A51 * k1y + A52 * k2y + A53 * k3y + A54 * k4y), &k5x, &k5y)
            rhs(&F, x + h * (A61 * k1x + A62 * k2x + A63 * k3x + A64 * k4x + A65 * k5x),
                y + h * (A61 * k1y + A62 * k2y + A63 * k3y + A64 * k4y + A65 * k5y), &k6x, &k6y)
            xn = x + h * (B1 * k1x + B3 * k3x + B4 * k4x + B5 * k5x + B6 * k6x)
            yn = y + h * (B1 * k1y + B3 * k3y + B4 * k4y + B5 * k5y + B6 * k6y)
            rhs(&F, xn, yn, &k7x, &k7y)
            ex = h * (E1 * k1x + E3 * k3x + E4 * k4x + E5 * k5x + E6 * k6x + E7 * k7x)
            ey = h * (E1 * k1y + E3 * k3y + E4 * k4y + E5 * k5y + E6 * k6y + E7 * k7y)
            err = err_norm(ex, ey, x, y, xn, yn, rtol, atol)
            steps += 1
            if not (isfinite(xn) and isfinite(yn) and isfinite(err)):
                status = 2
                break
            if err <= 1.0:
                t = t_end if last else t + h
                x = xn
                y = yn
                k1x = k7x
                k1y = k7y
                naccept += 1
                if t >= t_record:
                    if n == cap:
                        with gil:
                            cap *= 2
                            ts = np.resize(ts, cap)
                            xs = np.resize(xs, cap)
                            ys = np.resize(ys, cap)
                            tv = ts
                            xv = xs
                            yv = ys
                    tv[n] = t; xv[n] = x; yv[n] = y; n += 1
                fac = 0.9 * pow(err, -0.2) if err > 0.0 else 5.0
                h = h * fmin(5.0, fmax(0.2, fac))
            else:
                nreject += 1
                h = h * fmax(0.2, 0.9 * pow(err, -0.2))

    return status, ts[:n].copy(), xs[:n].copy(), ys[:n].copy(), naccept, nreject, h, t, x, y
