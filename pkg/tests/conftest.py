import pytest
import sympy as sp
from hypothesis import strategies as st

from canardkit.algebra import Polynomial, Rational, RationalFunction

SX, SY, SMU, SEPS, SU = sp.symbols("x y mu eps u")
SYMS = (SX, SY, SMU, SEPS, SU)


def to_sympy(p):
    """Independent reading of a canonical string through sympy's parser."""
    if isinstance(p, RationalFunction):
        return to_sympy(p.num) / to_sympy(p.den)
    text = str(p).replace("^", "**")
    return sp.sympify(text, locals=dict(zip(("x", "y", "mu", "eps", "u"), SYMS)))


def same(a, b) -> bool:
    return sp.simplify(to_sympy(a) - b) == 0


small_rationals = st.builds(
    lambda n, d: Rational(n, d),
    st.integers(-6, 6),
    st.integers(1, 4),
)

exponents = st.tuples(st.integers(0, 3), st.integers(0, 2), st.integers(0, 1), st.integers(0, 1), st.just(0))


@st.composite
def polynomials(draw, max_terms=4, nonzero=False):
    terms = draw(st.lists(st.tuples(exponents, small_rationals), min_size=1 if nonzero else 0, max_size=max_terms))
    p = Polynomial()
    for e, c in terms:
        p = p + Polynomial.monomial(e, c)
    if nonzero and not p:
        p = Polynomial.constant(1)
    return p


@st.composite
def xy_polynomials(draw, max_terms=3, nonzero=False):
    terms = draw(st.lists(
        st.tuples(st.tuples(st.integers(0, 3), st.integers(0, 2), st.just(0), st.just(0), st.just(0)),
                  small_rationals),
        min_size=1 if nonzero else 0, max_size=max_terms))
    p = Polynomial()
    for e, c in terms:
        p = p + Polynomial.monomial(e, c)
    if nonzero and not p:
        p = Polynomial.constant(1)
    return p


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
