"""Symbolic differentiation and substitution."""

from __future__ import annotations

from typing import Mapping

from .nodes import (
    ONE,
    ZERO,
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
    as_expr,
)
from .rational import normalize


def _d(e: Expr, v: str) -> Expr:
    if isinstance(e, (Variable, Parameter)):
        return ONE if e.name == v else ZERO
    if isinstance(e, RationalConstant):
        return ZERO
    if isinstance(e, Sum):
        return Sum(tuple(_d(t, v) for t in e.terms))
    if isinstance(e, Product):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            df = _d(f, v)
            if df == ZERO:
                continue
            terms.append(Product(fs[:i] + (df,) + fs[i + 1 :]))
        return Sum(tuple(terms)) if terms else ZERO
    if isinstance(e, Power):
        n = e.exponent
        if n == 0:
            return ZERO
        return Product((RationalConstant(n), Power(e.base, n - 1), _d(e.base, v)))
    if isinstance(e, Quotient):
        dn, dd = _d(e.num, v), _d(e.den, v)
        top = Sum((Product((dn, e.den)), Product((RationalConstant(-1), e.num, dd))))
        return Quotient(top, Power(e.den, 2))
    if isinstance(e, Exp):
        return Product((e, _d(e.arg, v)))
    if isinstance(e, Log):
        return Quotient(_d(e.arg, v), e.arg)
    raise TypeError(f"unknown node {type(e).__name__}")


def differentiate(e: Expr, v: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``v``, normalized."""
    return normalize(_d(e, v))


def substitute(e: Expr, mapping: Mapping[str, object], *, normal: bool = True) -> Expr:
    """Replace variables/parameters by name.  Values may be Exprs or numbers."""
    repl = {k: as_expr(v) for k, v in mapping.items()}

    def go(node: Expr) -> Expr:
        if isinstance(node, (Variable, Parameter)):
            return repl.get(node.name, node)
        if isinstance(node, RationalConstant):
            return node
        if isinstance(node, Sum):
            return Sum(tuple(go(t) for t in node.terms))
        if isinstance(node, Product):
            return Product(tuple(go(t) for t in node.factors))
        if isinstance(node, Power):
            return Power(go(node.base), node.exponent)
        if isinstance(node, Quotient):
            return Quotient(go(node.num), go(node.den))
        if isinstance(node, Exp):
            return Exp(go(node.arg))
        if isinstance(node, Log):
            return Log(go(node.arg))
        raise TypeError(f"unknown node {type(node).__name__}")

    out = go(e)
    return normalize(out) if normal else out
