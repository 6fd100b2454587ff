"""Recursive-descent parser for the expression grammar.

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' integer)?
    base   := number | identifier | '(' expr ')'
            | ('exp' | 'log') '(' expr ')' | '-' factor

``x1`` and ``x2`` are variables, every other identifier is a parameter.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from .nodes import (
    MINUS_ONE,
    VARIABLES,
    Exp,
    Expr,
    Log,
    Parameter,
    Power,
    Product,
    Quotient,
    RationalConstant,
    Sum,
    Variable,
)

FUNCTIONS = ("exp", "log")


class ExprSyntaxError(ValueError):
    """Malformed expression text; ``offset`` is a byte offset into the UTF-8 input."""

    def __init__(self, message: str, offset: int, text: str = ""):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset
        self.text = text


class UnknownFunctionError(ExprSyntaxError):
    def __init__(self, name: str, offset: int, text: str = ""):
        super().__init__(f"unknown function '{name}' (only exp, log allowed)", offset, text)
        self.name = name


class _Tok(NamedTuple):
    kind: str  # num, id, op, end
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[_Tok]:
    data = text.encode("utf-8")
    # Operate on bytes so offsets are byte offsets even for non-ASCII input.
    s = data.decode("latin-1")
    pos, out = 0, []
    while True:
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos >= len(s):
            out.append(_Tok("end", "", pos))
            return out
        m = _TOKEN_RE.match(s, pos)
        if not m or m.end() == pos:
            ch = data[pos:].decode("utf-8", errors="replace")[:1]
            raise ExprSyntaxError(f"unexpected character {ch!r}", pos, text)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.cur
        raise ExprSyntaxError(msg, tok.offset, self.text)

    def _eat(self, op: str) -> bool:
        if self.cur.kind == "op" and self.cur.text == op:
            self.i += 1
            return True
        return False

    def _expect(self, op: str):
        if not self._eat(op):
            got = self.cur.text or "end of input"
            self._error(f"expected '{op}', got {got!r}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.cur.kind != "end":
            self._error(f"unexpected {self.cur.text!r}")
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.cur.kind == "op" and self.cur.text in "+-":
            op = self.cur.text
            self.i += 1
            t = self.term()
            terms.append(t if op == "+" else Product((MINUS_ONE, t)))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Expr:
        e = self.factor()
        while self.cur.kind == "op" and self.cur.text in "*/":
            op = self.cur.text
            self.i += 1
            rhs = self.factor()
            e = Product((e, rhs)) if op == "*" else Quotient(e, rhs)
        return e

    def factor(self) -> Expr:
        base = self.base()
        if self._eat("^"):
            base = Power(base, self._integer())
        return base

    def _integer(self) -> int:
        paren = self._eat("(")
        sign = -1 if self._eat("-") else 1
        tok = self.cur
        if tok.kind != "num" or not tok.text.isdigit():
            self._error("integer exponent expected")
        self.i += 1
        if paren:
            self._expect(")")
        return sign * int(tok.text)

    def base(self) -> Expr:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            return RationalConstant(Fraction(tok.text))
        if tok.kind == "id":
            self.i += 1
            nxt = self.cur
            if nxt.kind == "op" and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise UnknownFunctionError(tok.text, tok.offset, self.text)
                self.i += 1
                arg = self.expr()
                self._expect(")")
                return Exp(arg) if tok.text == "exp" else Log(arg)
            if tok.text in FUNCTIONS:
                self._error(f"'{tok.text}' must be followed by '('", nxt)
            if tok.text in VARIABLES:
                return Variable(tok.text)
            return Parameter(tok.text)
        if self._eat("("):
            e = self.expr()
            self._expect(")")
            return e
        if self._eat("-"):
            return Product((MINUS_ONE, self.factor()))
        if tok.kind == "end":
            self._error("unexpected end of input")
        self._error(f"unexpected {tok.text!r}")


def parse_raw(text: str) -> Expr:
    """Parse without normalizing."""
    return _Parser(text).parse()


def parse(text: str) -> Expr:
    """Parse ``text`` and return its normal form."""
    from .rational import normalize

    return normalize(parse_raw(text))
