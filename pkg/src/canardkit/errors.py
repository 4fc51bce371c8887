"""Exception hierarchy.

Every error carries a stable ``code`` string used by the CLI when it
serializes failures to JSON on standard error.
"""

from __future__ import annotations


class CanardKitError(Exception):
    code = "error"

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self)}


# -- algebra ---------------------------------------------------------------

class AlgebraError(CanardKitError, ArithmeticError):
    code = "algebra_error"


class ZeroDenominator(AlgebraError, ZeroDivisionError):
    code = "zero_denominator"


class NonInvertibleSeries(ZeroDenominator):
    """Series division where the divisor's constant term vanishes."""

    code = "non_invertible_series"


class DivergentLimit(AlgebraError):
    code = "divergent_limit"


class TruncationTooShort(DivergentLimit):
    """The limit cannot be decided at the current truncation order."""

    code = "truncation_too_short"


class PoleAtPoint(AlgebraError, ZeroDivisionError):
    code = "pole_at_point"


class InexactDivision(AlgebraError):
    code = "inexact_division"


# -- sysmodel --------------------------------------------------------------

class ModelError(CanardKitError, ValueError):
    code = "model_error"


class ExprSyntaxError(ModelError):
    code = "syntax_error"

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update(line=self.line, column=self.column)
        return d


class NonPolynomial(ModelError):
    code = "non_polynomial"


class NotAffineInY(ModelError):
    code = "not_affine_in_y"


class DegenerateFastEquation(ModelError):
    code = "degenerate_fast_equation"


class ParameterDependentCriticalManifold(ModelError):
    code = "parameter_dependent_critical_manifold"


class NoFold(ModelError):
    code = "no_fold"


# -- expansion solvers -----------------------------------------------------

class SolverError(CanardKitError):
    code = "solver_error"


class NonlinearParameterEntry(SolverError):
    code = "nonlinear_parameter_entry"


class UnremovableSingularity(SolverError):
    code = "unremovable_singularity"


class ParameterUnsolvable(SolverError):
    code = "parameter_unsolvable"


class DerivativeMismatch(SolverError):
    code = "derivative_mismatch"


# -- numerics --------------------------------------------------------------

class NumericError(CanardKitError):
    code = "numeric_error"


class StiffnessFloor(NumericError):
    code = "stiffness_floor"


class NonFinite(NumericError):
    code = "non_finite"


class NoOscillation(NumericError):
    code = "no_oscillation"


class BadBracket(NumericError, ValueError):
    code = "bad_bracket"
