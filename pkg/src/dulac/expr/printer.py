"""Text rendering that the parser reads back."""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
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

# binding strength: sum < product/quotient < unary minus < power < atom
_SUM, _PROD, _NEG, _POW, _ATOM = range(5)


def _const_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _is_negative(e: Expr) -> bool:
    if isinstance(e, RationalConstant):
        return e.value < 0
    if isinstance(e, Product) and e.factors:
        return _is_negative(e.factors[0])
    if isinstance(e, Quotient):
        return _is_negative(e.num)
    return False


def _negate(e: Expr) -> Expr:
    """Flip the sign of a node known to be negative (see _is_negative)."""
    if isinstance(e, RationalConstant):
        return RationalConstant(-e.value)
    if isinstance(e, Product):
        head = _negate(e.factors[0])
        rest = e.factors[1:]
        if isinstance(head, RationalConstant) and head.value == 1 and rest:
            return rest[0] if len(rest) == 1 else Product(rest)
        return Product((head,) + rest)
    if isinstance(e, Quotient):
        return Quotient(_negate(e.num), e.den)
    raise ValueError("not a negative node")


def _level(e: Expr) -> int:
    if isinstance(e, Sum):
        return _SUM if len(e.terms) > 1 else _level(e.terms[0]) if e.terms else _ATOM
    if _is_negative(e):
        return _NEG
    if isinstance(e, RationalConstant):
        return _ATOM if e.value.denominator == 1 else _PROD
    if isinstance(e, (Product, Quotient)):
        return _PROD
    if isinstance(e, Power):
        return _POW
    return _ATOM


def _wrap(e: Expr, min_level: int) -> str:
    s = to_text(e)
    return f"({s})" if _level(e) < min_level else s


def to_text(e: Expr) -> str:
    if isinstance(e, (Variable, Parameter)):
        return e.name
    if isinstance(e, RationalConstant):
        return _const_text(e.value)
    if isinstance(e, Exp):
        return f"exp({to_text(e.arg)})"
    if isinstance(e, Log):
        return f"log({to_text(e.arg)})"
    if isinstance(e, Sum):
        if not e.terms:
            return "0"
        parts = []
        for i, t in enumerate(e.terms):
            if i and _is_negative(t):
                parts.append(" - " + _wrap(_negate(t), _PROD))
            elif i:
                parts.append(" + " + _wrap(t, _PROD))
            else:
                parts.append(_wrap(t, _PROD) if not _is_negative(t) else to_text(t))
        return "".join(parts)
    if isinstance(e, Power):
        return f"{_wrap(e.base, _ATOM)}^{e.exponent}"
    if isinstance(e, Product):
        if not e.factors:
            return "1"
        if _is_negative(e):
            return "-" + _wrap(_negate(e), _POW if len(e.factors) == 1 else _PROD)
        return "*".join(
            _wrap(f, _PROD if i == 0 else _POW) for i, f in enumerate(e.factors)
        )
    if isinstance(e, Quotient):
        if _is_negative(e.num):
            return "-" + to_text(Quotient(_negate(e.num), e.den))
        return f"{_wrap(e.num, _PROD)}/{_wrap(e.den, _POW)}"
    raise TypeError(f"unknown node {type(e).__name__}")
