"""Multivariate polynomial gcd over Q.

Recursive primitive pseudo-remainder sequences: pick a main variable,
split off the content (a gcd over the remaining variables, computed
recursively) and run the PRS on primitive parts.  Results are normalized
to integer coefficients with content 1 and a positive leading coefficient.
"""

from __future__ import annotations

from canardkit.algebra.polynomial import Polynomial, var_power

_ONE = Polynomial.constant(1)


def _normalize(p: Polynomial) -> Polynomial:
    return p.primitive()[1]


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Primitive gcd (positive leading coefficient); gcd(0, 0) is 0."""
    if not a:
        return _normalize(b) if b else Polynomial()
    if not b:
        return _normalize(a)
    return _normalize(_gcd(a, b))


def content_in(p: Polynomial, v: int) -> Polynomial:
    """gcd of the coefficients of ``p`` viewed as a polynomial in ``v``."""
    coeffs = sorted(p.coefficients_in(v).values(), key=len)
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = _gcd(g, c)
    if g.is_constant():
        return _ONE
    return _normalize(g)


def _divide_coefficients(p: Polynomial, v: int, c: Polynomial) -> Polynomial:
    if c.is_constant():
        return p.scale(1 / c.constant_value())
    parts = {k: q.exact_div(c) for k, q in p.coefficients_in(v).items()}
    return Polynomial.from_coefficients(v, parts)


def primitive_part_in(p: Polynomial, v: int) -> Polynomial:
    if set(p.variables()) <= {v}:
        return _normalize(p)
    return _normalize(_divide_coefficients(p, v, content_in(p, v)))


def _gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while True:
        if a.is_constant() or b.is_constant():
            return _ONE
        if a == b:
            return a
        va, vb = set(a.variables()), set(b.variables())
        if va == vb:
            break
        # a common divisor cannot involve a variable missing from either side
        for v in va - vb:
            a = content_in(a, v)
            if a.is_constant():
                return _ONE
        for v in vb - va:
            b = content_in(b, v)
            if b.is_constant():
                return _ONE
    common = set(a.variables())
    # main variable: the one with the smallest combined degree keeps the PRS short
    v = min(common, key=lambda w: (max(a.degree(w), b.degree(w)), w))
    if len(common) == 1:
        return _prs(_normalize(a), _normalize(b), v)
    ca, cb = content_in(a, v), content_in(b, v)
    pa = _normalize(_divide_coefficients(a, v, ca))
    pb = _normalize(_divide_coefficients(b, v, cb))
    c = _gcd(ca, cb) if not (ca.is_constant() or cb.is_constant()) else _ONE
    g = _prs(pa, pb, v)
    return g * c


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    db = b.degree(v)
    lcb = b.coefficients_in(v)[db]
    const_lc = lcb.is_constant()
    r = a
    while r:
        dr = r.degree(v)
        if dr < db:
            break
        lcr = r.coefficients_in(v)[dr]
        shift = Polynomial._raw({var_power(v, dr - db): lcr.constant_value()}) if lcr.is_constant() else lcr * Polynomial.var(v, dr - db)
        if const_lc:
            r = r - (b * shift).scale(1 / lcb.constant_value())
        else:
            r = r * lcb - b * shift
    return r


def _prs(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """gcd of two polynomials that are primitive with respect to ``v``."""
    if a.degree(v) < b.degree(v):
        a, b = b, a
    while b:
        if b.degree(v) == 0:
            return _ONE
        r = _prem(a, b, v)
        a, b = b, (primitive_part_in(r, v) if r else r)
    return _normalize(a)
