"""Expression tree nodes.

Nodes are frozen dataclasses, so structural equality and hashing come for
free and values can be shared between worker processes.  Arithmetic
operators build *raw* trees; call :func:`dulac.expr.normalize` to obtain the
canonical form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

VARIABLES = ("x1", "x2")
# Internal univariate symbol used for gamma(z); never produced by the parser.
Z_SYMBOL = "z"

Number = Union[int, Fraction]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def children(self) -> tuple[Expr, ...]:
        return ()

    def walk(self) -> Iterator[Expr]:
        yield self
        for child in self.children():
            yield from child.walk()

    def symbols(self) -> set[str]:
        """Names of all variables and parameters occurring in the tree."""
        out = set()
        for node in self.walk():
            if isinstance(node, (Variable, Parameter)):
                out.add(node.name)
        return out

    def parameters(self) -> set[str]:
        return {n.name for n in self.walk() if isinstance(n, Parameter)}

    def is_rational(self) -> bool:
        """True when no exp/log node occurs."""
        return not any(isinstance(n, (Exp, Log)) for n in self.walk())

    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Product((MINUS_ONE, as_expr(other)))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Product((MINUS_ONE, self))))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Quotient(self, as_expr(other))

    def __rtruediv__(self, other):
        return Quotient(as_expr(other), self)

    def __neg__(self):
        return Product((MINUS_ONE, self))

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer exponents are supported")
        return Power(self, n)

    def __str__(self) -> str:
        from .printer import to_text

        return to_text(self)


@dataclass(frozen=True, eq=True, repr=True)
class Variable(Expr):
    name: str


@dataclass(frozen=True, eq=True, repr=True)
class Parameter(Expr):
    name: str


@dataclass(frozen=True, eq=True, repr=True)
class RationalConstant(Expr):
    value: Fraction

    def __post_init__(self):
        # Fraction is always gcd-reduced with a positive denominator.
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True, eq=True, repr=True)
class Sum(Expr):
    terms: tuple[Expr, ...]

    def children(self):
        return self.terms


@dataclass(frozen=True, eq=True, repr=True)
class Product(Expr):
    factors: tuple[Expr, ...]

    def children(self):
        return self.factors


@dataclass(frozen=True, eq=True, repr=True)
class Power(Expr):
    base: Expr
    exponent: int

    def children(self):
        return (self.base,)


@dataclass(frozen=True, eq=True, repr=True)
class Quotient(Expr):
    num: Expr
    den: Expr

    def children(self):
        return (self.num, self.den)


@dataclass(frozen=True, eq=True, repr=True)
class Exp(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, eq=True, repr=True)
class Log(Expr):
    arg: Expr

    def children(self):
        return (self.arg,)


ZERO = RationalConstant(Fraction(0))
ONE = RationalConstant(Fraction(1))
MINUS_ONE = RationalConstant(Fraction(-1))
X1 = Variable("x1")
X2 = Variable("x2")
Z = Variable(Z_SYMBOL)


def const(value: Number | str) -> RationalConstant:
    return RationalConstant(Fraction(value))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalConstant(Fraction(value))
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def var(name: str) -> Variable:
    return Variable(name)


def param(name: str) -> Parameter:
    return Parameter(name)
