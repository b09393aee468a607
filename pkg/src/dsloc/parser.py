"""Recursive-descent parser and canonical renderer for super-polynomials.

Grammar::

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' signed_int)?
    atom     := rational | identifier | '(' expr ')'
    rational := int ('/' posint)?

Identifiers must be variables of the presentation.  ``render`` emits exactly
this grammar, so ``parse_expression(render(f), P) == f``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import Presentation, SuperPoly
from .errors import NotInvertibleError, ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, presentation: Presentation):
        self.tokens = tokenize(text)
        self.i = 0
        self.pres = presentation

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> SuperPoly:
        negate = False
        if self.peek()[0] == "-":
            self.take()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> SuperPoly:
        value = self.factor()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self) -> SuperPoly:
        start = self.peek()[2]
        base, ident = self.atom()
        if self.peek()[0] != "^":
            return base
        self.take()
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        e = sign * int(self.take("int")[1])
        if e < 0 and ident is not None and not self.pres.variable(ident).laurent:
            raise ParseError(f"negative exponent on non-laurent variable {ident!r}", start)
        try:
            return base**e
        except NotInvertibleError as exc:
            raise ParseError(f"negative exponent on a non-unit: {exc}", start) from None

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "int":
            self.take()
            value = Fraction(int(text))
            if self.peek()[0] == "/":
                self.take()
                den_tok = self.take("int")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2])
                value /= den
            return self.pres.const(value), None
        if kind == "ident":
            self.take()
            if text not in self.pres:
                raise ParseError(f"unknown identifier {text!r}", pos)
            return self.pres.var(text), text
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value, None
        got = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"expected a number, variable or '(', found {got}", pos)


def parse_expression(text: str, presentation: Presentation) -> SuperPoly:
    p = _Parser(text, presentation)
    value = p.expr()
    p.take("end")
    return value


def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def monomial_sort_key(m):
    return (sum(abs(e) for e in m.exps), len(m.odd), tuple(-e for e in m.exps), m.odd)


def render_monomial(m, presentation: Presentation) -> str:
    factors = []
    for v, e in zip(presentation.even, m.exps):
        if e == 1:
            factors.append(v.name)
        elif e:
            factors.append(f"{v.name}^{e}")
    factors += [presentation.odd[i].name for i in m.odd]
    return "*".join(factors)


def render(f: SuperPoly) -> str:
    """Canonical text form; terms ordered by degree, then lexicographically."""
    if f.is_zero():
        return "0"
    pieces = []
    for m in sorted(f.terms, key=monomial_sort_key):
        c = f.terms[m]
        body = render_monomial(m, f.presentation)
        mag = abs(c)
        if not body:
            text = _format_coefficient(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_format_coefficient(mag)}*{body}"
        pieces.append(("-" if c < 0 else "+", text))
    sign, text = pieces[0]
    out = ("-" if sign == "-" else "") + text
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out
