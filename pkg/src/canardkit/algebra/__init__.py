"""Exact arithmetic kernel: rationals, polynomials, rational functions, eps-series."""

from canardkit.algebra.rational import Rational, to_rational, rational_str
from canardkit.algebra.polynomial import (
    EPS, MU, NVARS, U, VARS, X, Y,
    Polynomial, pack, unpack, poly_arith, var_index,
)
from canardkit.algebra.gcd import poly_gcd
from canardkit.algebra.ratfunc import RationalFunction, eval_rational, partial_derivative
from canardkit.algebra.series import (
    EpsSeries, eps_limit, series_coefficient_limit, substitute, substitute_quotient, substitute_series,
)

__all__ = [
    "Rational", "to_rational", "rational_str",
    "EPS", "MU", "NVARS", "U", "VARS", "X", "Y",
    "Polynomial", "pack", "unpack", "poly_arith", "var_index",
    "poly_gcd", "RationalFunction", "eval_rational", "partial_derivative",
    "EpsSeries", "eps_limit", "series_coefficient_limit", "substitute", "substitute_quotient", "substitute_series",
]
