"""Canonical rational normal form.

Every expression is viewed as a rational function whose generators are the
variables, the parameters and the opaque ``exp(...)``/``log(...)`` atoms
(with normalized arguments).  Numerator and denominator are cancelled by
their polynomial gcd (sympy's sparse polynomial ring does the gcd work) and
then scaled so that both have integer coefficients with no common content
and the denominator's leading term is positive.  The result is unique, so
``normalize`` is idempotent and structural equality of normal forms decides
equality of rational expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

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
)

Monomial = tuple[int, ...]

_VAR_ORDER = {"x1": 0, "x2": 1, "z": 2}


def _gen_key(g: Expr):
    from .printer import to_text

    if isinstance(g, Variable):
        return (0, _VAR_ORDER.get(g.name, 9), g.name)
    if isinstance(g, (Exp, Log)):
        return (1, type(g).__name__, to_text(g.arg))
    return (2, 0, g.name)


def _term_key(gens: tuple[Expr, ...]):
    """Sort key for monomials: variable degree first, then atoms, then parameters."""
    groups = [[i for i, g in enumerate(gens) if _gen_key(g)[0] == k] for k in range(3)]

    def key(mono: Monomial):
        out = []
        for idx in groups:
            out.append(-sum(mono[i] for i in idx))
            out.extend(-mono[i] for i in idx)
        return tuple(out)

    return key


@lru_cache(maxsize=64)
def _ring(n: int):
    names = ",".join(f"g{i}" for i in range(n)) if n else "g0"
    R, *gens = ring(names, QQ)
    return R, tuple(gens)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


@dataclass(frozen=True)
class RationalForm:
    """Cancelled numerator/denominator pair over ``gens``.

    ``num`` and ``den`` map exponent tuples (aligned with ``gens``) to
    integer-valued Fractions.  ``den`` is never empty.
    """

    gens: tuple[Expr, ...]
    num: tuple[tuple[Monomial, Fraction], ...]
    den: tuple[tuple[Monomial, Fraction], ...]

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and not any(self.den[0][0])

    def is_rational(self) -> bool:
        return not any(isinstance(g, (Exp, Log)) for g in self.gens)

    def numerator_expr(self) -> Expr:
        return _poly_expr(self.gens, self.num)

    def denominator_expr(self) -> Expr:
        return _poly_expr(self.gens, self.den)

    def to_expr(self) -> Expr:
        num = self.numerator_expr()
        if self.is_polynomial:
            c = self.den[0][1]
            if c == 1:
                return num
            # den is a positive integer constant
            return _poly_expr(self.gens, tuple((m, v / c) for m, v in self.num))
        return Quotient(num, self.denominator_expr())

    @classmethod
    def from_expr(cls, e: Expr) -> RationalForm:
        prepared, gens = _prepare(e)
        gens = tuple(sorted(gens, key=_gen_key))
        R, ring_gens = _ring(len(gens))
        index = {g: ring_gens[i] for i, g in enumerate(gens)}
        num, den = _to_ring(prepared, R, index)
        num, den = num.cancel(den)
        return cls._canonical(gens, num, den)

    @classmethod
    def _canonical(cls, gens, num, den) -> RationalForm:
        n = len(gens)
        num_t = [(m[:n], _to_fraction(c)) for m, c in num.terms()]
        den_t = [(m[:n], _to_fraction(c)) for m, c in den.terms()]
        if not num_t:
            return cls(gens, (), (((0,) * n, Fraction(1)),))
        coeffs = [c for _, c in num_t + den_t]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
        ints = [int(c * lcm) for c in coeffs]
        g = reduce(math.gcd, ints)
        key = _term_key(gens)
        den_t.sort(key=lambda t: key(t[0]))
        num_t.sort(key=lambda t: key(t[0]))
        scale = Fraction(lcm, g)
        if den_t[0][1] < 0:
            scale = -scale
        num_t = tuple((m, c * scale) for m, c in num_t)
        den_t = tuple((m, c * scale) for m, c in den_t)
        # drop generators that cancelled out entirely
        used = [i for i in range(n) if any(m[i] for m, _ in num_t + den_t)]
        if len(used) != n:
            gens = tuple(gens[i] for i in used)
            num_t = tuple((tuple(m[i] for i in used), c) for m, c in num_t)
            den_t = tuple((tuple(m[i] for i in used), c) for m, c in den_t)
        return cls(gens, num_t, den_t)


def _poly_expr(gens, terms) -> Expr:
    if not terms:
        return ZERO
    parts = []
    # within a monomial: parameters, then variables, then exp/log atoms
    order = sorted(range(len(gens)), key=lambda i: ((_gen_key(gens[i])[0] + 1) % 3, i))
    for mono, c in terms:
        factors = []
        for g, k in ((gens[i], mono[i]) for i in order):
            if k == 1:
                factors.append(g)
            elif k > 1:
                factors.append(Power(g, k))
        if c != 1 or not factors:
            factors.insert(0, RationalConstant(c))
        parts.append(factors[0] if len(factors) == 1 else Product(tuple(factors)))
    return parts[0] if len(parts) == 1 else Sum(tuple(parts))


def _prepare(e: Expr) -> tuple[Expr, set]:
    """Normalize exp/log arguments and collect generators."""
    gens: set = set()

    def go(node: Expr) -> Expr:
        if isinstance(node, (Variable, Parameter)):
            gens.add(node)
            return node
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
            arg = normalize(node.arg)
            if arg == ZERO:
                return ONE
            atom = Exp(arg)
        elif isinstance(node, Log):
            arg = normalize(node.arg)
            if arg == ONE:
                return ZERO
            if isinstance(arg, Exp):
                return go(arg.arg)
            atom = Log(arg)
        else:
            raise TypeError(f"unknown node {type(node).__name__}")
        gens.add(atom)
        return atom

    return go(e), gens


def _to_ring(e: Expr, R, index):
    if isinstance(e, RationalConstant):
        q = e.value
        return R(QQ(q.numerator, q.denominator)), R.one
    if isinstance(e, Sum):
        num, den = R.zero, R.one
        for t in e.terms:
            a, b = _to_ring(t, R, index)
            if b == den:
                num = num + a
            else:
                num, den = (num * b + a * den).cancel(den * b)
        return num, den
    if isinstance(e, Product):
        num, den = R.one, R.one
        for t in e.factors:
            a, b = _to_ring(t, R, index)
            num, den = num * a, den * b
        if den != R.one:
            num, den = num.cancel(den)
        return num, den
    if isinstance(e, Power):
        a, b = _to_ring(e.base, R, index)
        n = e.exponent
        if n >= 0:
            return a**n, b**n
        if a.is_zero:
            raise ZeroDivisionError(f"zero raised to negative power in {e}")
        return b ** (-n), a ** (-n)
    if isinstance(e, Quotient):
        a, b = _to_ring(e.num, R, index)
        c, d = _to_ring(e.den, R, index)
        if c.is_zero:
            raise ZeroDivisionError(f"denominator is identically zero in {e}")
        return (a * d).cancel(b * c)
    return index[e], R.one


@lru_cache(maxsize=8192)
def normalize(e: Expr) -> Expr:
    """Canonical form of ``e`` (idempotent)."""
    return RationalForm.from_expr(e).to_expr()


def rational_form(e: Expr) -> RationalForm:
    return RationalForm.from_expr(e)


def numerator_denominator(e: Expr) -> tuple[Expr, Expr]:
    rf = RationalForm.from_expr(e)
    num = rf.numerator_expr()
    den = rf.denominator_expr()
    return num, den
