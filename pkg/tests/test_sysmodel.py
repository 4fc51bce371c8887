import json

import pytest
import sympy as sp
from hypothesis import given, settings

from canardkit.errors import (
    DegenerateFastEquation, ExprSyntaxError, ModelError, NoFold, NonPolynomial, NotAffineInY,
    ParameterDependentCriticalManifold,
)
from canardkit.algebra import EPS, MU, X, Y, Polynomial, Rational, RationalFunction
from canardkit.algebra.polynomial import x, y, mu, eps
from canardkit.sysmodel import (
    SPSystem, critical_manifold, fast_time_field, fold_points, load_system, parse_system, select_fold, vdp,
)
from canardkit.sysmodel.parser import parse_expression, tokenize
from conftest import polynomials


# -- parser ----------------------------------------------------------------------

def test_parses_fast_equation():
    assert parse_expression("x + y - x^3/3") == x + y - x ** 3 / 3


def test_parses_slow_equation():
    assert parse_expression("mu - x") == mu - x


def test_rejects_division_by_variable():
    with pytest.raises(NonPolynomial):
        parse_expression("x / y")


def test_rational_literals_are_exact():
    p = parse_expression("x^3/3")
    assert p.items()[0][1] == Rational(1, 3)
    assert parse_expression("(1/3)*x^3") == p
    assert parse_expression("3/6") == Polynomial.constant(Rational(1, 2))


def test_precedence_and_grouping():
    assert parse_expression("2*(x+1)^2 - eps*y") == 2 * (x + 1) ** 2 - eps * y
    assert parse_expression("  x*  y ") == x * y


@pytest.mark.parametrize("text, column", [("x +", 4), ("x * * y", 5), ("(x + y", 7), ("x y", 3), ("2 $ x", 3)])
def test_syntax_errors_carry_position(text, column):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression(text)
    assert info.value.line == 1
    assert info.value.column == column


def test_syntax_error_line_numbers():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("x +\n  * y")
    assert (info.value.line, info.value.column) == (2, 3)


def test_no_implicit_multiplication_and_no_u():
    with pytest.raises(ExprSyntaxError):
        parse_expression("2x")
    with pytest.raises(ExprSyntaxError):
        parse_expression("u + x")
    assert parse_expression("u + x", allow_u=True).depends_on(4)


def test_division_by_zero_literal():
    with pytest.raises(ExprSyntaxError):
        parse_expression("x/0")


def test_tokenizer_positions():
    toks = tokenize("mu - 12/5")
    assert [t.text for t in toks[:4]] == ["mu", "-", "12", "/"]


@settings(max_examples=100)
@given(polynomials())
def test_print_parse_round_trip(p):
    q = parse_expression(str(p))
    assert q == p
    assert str(q) == str(p)


def test_parser_agrees_with_sympy():
    text = "(x - 2*y)^3/7 + mu*eps - 5/2*x*(y + 1)"
    ours = parse_expression(text)
    sx, sy, smu, se = sp.symbols("x y mu eps")
    ref = sp.expand((sx - 2 * sy) ** 3 / 7 + smu * se - sp.Rational(5, 2) * sx * (sy + 1))
    assert sp.expand(sp.sympify(str(ours).replace("^", "**")) - ref) == 0


# -- systems -----------------------------------------------------------------------

def test_vdp_definition():
    s = vdp()
    assert s.f == x + y - x ** 3 / 3
    assert s.g == mu - x
    assert s.affine_in_y


def test_parse_system_formats(tmp_path):
    text = json.dumps({"name": "demo", "f": "y - x", "g": "mu - x"})
    s = parse_system(text)
    assert (s.name, s.f, s.g) == ("demo", y - x, mu - x)
    t = parse_system("f = y - x\ng = mu - x\n", name="lines")
    assert t.f == s.f and t.name == "lines"
    path = tmp_path / "sys.json"
    path.write_text(text, encoding="utf-8")
    assert load_system(str(path)).g == mu - x
    assert load_system("vdp").name == "vdp"


def test_system_rejects_u():
    with pytest.raises(ModelError):
        SPSystem(x + Polynomial.var(4), mu - x)


def test_critical_manifold_of_vdp():
    assert critical_manifold(vdp()).F0 == RationalFunction(x ** 3 / 3 - x)


def test_critical_manifold_of_linear_system():
    assert critical_manifold(SPSystem(y - x, mu - x)).F0 == RationalFunction(x)


def test_not_affine_in_y():
    with pytest.raises(NotAffineInY):
        critical_manifold(SPSystem(y ** 2 - x, mu - x))


def test_user_supplied_graph_is_verified():
    s = SPSystem(y ** 2 - x ** 2, mu - x, F0=RationalFunction(x))
    assert critical_manifold(s).F0 == RationalFunction(x)
    with pytest.raises(ModelError):
        critical_manifold(SPSystem(y ** 2 - x ** 2, mu - x, F0=RationalFunction(2 * x)))


def test_degenerate_and_parameter_dependent_fast_equations():
    with pytest.raises(DegenerateFastEquation):
        critical_manifold(SPSystem(eps * y + x, mu - x))
    with pytest.raises(ParameterDependentCriticalManifold):
        critical_manifold(SPSystem(y - x + mu, mu - x))


CORPUS = [
    vdp(),
    SPSystem(y - x, mu - x),
    SPSystem(x ** 2 * y + y - x ** 4 + eps * x, mu - x ** 3),
    SPSystem((1 + x ** 2) * y - x ** 3 / 3 + x + eps * x * y, mu - x + y),
    SPSystem(2 * y - x ** 2 + eps * mu, mu * (1 - x)),
]


@pytest.mark.parametrize("s", CORPUS)
def test_critical_manifold_residual_is_zero(s):
    F0 = critical_manifold(s).F0
    assert RationalFunction(s.f.subs(EPS, 0)).subs(Y, F0) == RationalFunction(0)


def test_fold_points_of_vdp():
    folds = fold_points(critical_manifold(vdp()))
    assert [fp.x0 for fp in folds] == [-1, 1]
    assert all(fp.exact for fp in folds)
    assert [fp.y0 for fp in folds] == [Rational(2, 3), Rational(-2, 3)]
    assert select_fold(folds).x0 == 1
    assert select_fold(folds, "-1").x0 == -1
    with pytest.raises(ModelError):
        select_fold(folds, "2")


def test_no_fold_for_a_line():
    with pytest.raises(NoFold):
        fold_points(critical_manifold(SPSystem(y - x, mu - x)))


def test_triple_root_collapses():
    assert [fp.x0 for fp in fold_points(critical_manifold(SPSystem(y - x ** 3, mu - x)))] == [0]


def test_irrational_folds_to_tolerance():
    s = SPSystem(y - x ** 3 / 3 + 2 * x, mu - x)  # F0' = x^2 - 2
    folds = fold_points(critical_manifold(s))
    assert [fp.exact for fp in folds] == [False, False]
    for fp in folds:
        assert abs(fp.x0 ** 2 - 2) <= 1e-12
    assert abs(folds[1].x0 - 2 ** 0.5) <= 1e-12


@pytest.mark.parametrize("s", [CORPUS[0], CORPUS[4]])
def test_exact_folds_zero_the_derivative(s):
    m = critical_manifold(s)
    for fp in fold_points(m):
        if fp.exact:
            assert m.derivative().evaluate({X: fp.x0}) == 0


def test_fast_time_field():
    f, g = fast_time_field(vdp())
    assert f == x + y - x ** 3 / 3
    assert g == eps * (mu - x)
    f0, g0 = fast_time_field(SPSystem(y - x, Polynomial()))
    assert g0 == Polynomial()
    s = CORPUS[3]
    assert fast_time_field(s)[1].degree(EPS) == 1 + s.g.degree(EPS)
