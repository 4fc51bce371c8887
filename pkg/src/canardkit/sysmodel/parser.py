"""Recursive-descent parser for polynomial vector-field expressions.

Grammar (whitespace insignificant, no implicit multiplication)::

    expr     := ["-"] term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := base ("^" natural)?
    base     := "x" | "y" | "mu" | "eps" | rational | "(" expr ")"
    rational := integer ("/" positive-integer)?

Division is only allowed by nonzero constants, so every accepted
expression is a polynomial with exact rational coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from canardkit.errors import ExprSyntaxError, NonPolynomial
from canardkit.algebra import Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+)|(mu|eps|x|y|u)|(\S))")
_NAMES = {"x", "y", "mu", "eps"}


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    line: int
    column: int


def tokenize(text: str, allow_u: bool = False) -> list[Token]:
    tokens = []
    pos = 0
    line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]

    def where(offset: int) -> tuple[int, int]:
        line = max(i for i, s in enumerate(line_starts) if s <= offset)
        return line + 1, offset - line_starts[line] + 1

    names = _NAMES | ({"u"} if allow_u else set())
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, name, other = m.groups()
        start = m.start(m.lastindex)
        line, col = where(start)
        if num is not None:
            tokens.append(Token("num", num, line, col))
        elif name is not None:
            if name not in names:
                raise ExprSyntaxError(f"unknown identifier {name!r}", line, col)
            # reject identifiers glued to letters, e.g. "xy" or "mux"
            end = m.end()
            if end < len(text) and (text[end].isalnum() or text[end] == "_"):
                raise ExprSyntaxError(f"unknown identifier starting {name + text[end]!r}", line, col)
            tokens.append(Token("name", name, line, col))
        else:
            if other not in "+-*/^()":
                if other.isalpha():
                    word = re.match(r"[A-Za-z_]\w*", text[start:]).group(0)
                    raise ExprSyntaxError(f"unknown identifier {word!r}", line, col)
                raise ExprSyntaxError(f"unexpected character {other!r}", line, col)
            tokens.append(Token("op", other, line, col))
        pos = m.end()
    line, col = where(len(text))
    tokens.append(Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_u: bool):
        self.tokens = tokenize(text, allow_u)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.text != text:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ExprSyntaxError(f"expected {text!r}, found {found}", t.line, t.column)
        return self.take()

    def error(self, what: str) -> ExprSyntaxError:
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        return ExprSyntaxError(f"expected {what}, found {found}", t.line, t.column)

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.tok.kind != "end":
            raise self.error("operator or end of input")
        return p

    def expr(self) -> Polynomial:
        negate = False
        if self.tok.text == "-":
            self.take()
            negate = True
        acc = self.term()
        if negate:
            acc = -acc
        while self.tok.text in ("+", "-"):
            op = self.take().text
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.take()
            f = self.factor()
            if op.text == "*":
                acc = acc * f
            else:
                if not f.is_constant():
                    raise NonPolynomial(
                        f"division by non-constant expression {f} (line {op.line}, column {op.column})"
                    )
                if not f.constant_value():
                    raise ExprSyntaxError("division by zero", op.line, op.column)
                acc = acc / f.constant_value()
        return acc

    def factor(self) -> Polynomial:
        base = self.base()
        if self.tok.text == "^":
            self.take()
            t = self.tok
            if t.kind != "num":
                raise self.error("natural exponent")
            self.take()
            base = base ** int(t.text)
        return base

    def base(self) -> Polynomial:
        t = self.tok
        if t.kind == "name":
            self.take()
            return Polynomial.var(t.text)
        if t.kind == "num":
            self.take()
            return Polynomial.constant(int(t.text))
        if t.text == "(":
            self.take()
            p = self.expr()
            self.expect(")")
            return p
        raise self.error("variable, number or '('")


def parse_expression(text: str, allow_u: bool = False) -> Polynomial:
    """Parse one polynomial expression into canonical form."""
    return _Parser(text, allow_u).parse()
