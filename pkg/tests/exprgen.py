"""Seeded random expression generators shared by the property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from dulac.expr import X1, X2, Exp, Log, Parameter, Power, Product, Quotient, Sum, const

CONSTS = [Fraction(n) for n in (-3, -2, -1, 1, 2, 3)] + [Fraction(1, 2), Fraction(-3, 4)]


def leaf(rng: random.Random, params=()):
    r = rng.random()
    if r < 0.4:
        return X1
    if r < 0.8:
        return X2
    if params and r < 0.9:
        return Parameter(rng.choice(params))
    return const(rng.choice(CONSTS))


def rational_expr(rng: random.Random, depth: int = 3, params=(), safe: bool = True):
    """Random rational expression; with ``safe`` every denominator is (..)^2 + 1."""
    if depth <= 0 or rng.random() < 0.2:
        return leaf(rng, params)
    op = rng.random()
    a = rational_expr(rng, depth - 1, params, safe)
    if op < 0.3:
        return Sum((a, rational_expr(rng, depth - 1, params, safe)))
    if op < 0.6:
        return Product((a, rational_expr(rng, depth - 1, params, safe)))
    if op < 0.75:
        return Power(a, rng.choice((2, 3)))
    den = rational_expr(rng, depth - 1, params, safe)
    if safe:
        den = Sum((Power(den, 2), const(1)))
    return Quotient(a, den)


def transcendental_expr(rng: random.Random, depth: int = 3):
    """Random expression that may contain exp and log (log of a positive argument)."""
    if depth <= 0 or rng.random() < 0.2:
        return leaf(rng)
    op = rng.random()
    a = transcendental_expr(rng, depth - 1)
    if op < 0.25:
        return Sum((a, transcendental_expr(rng, depth - 1)))
    if op < 0.5:
        return Product((a, transcendental_expr(rng, depth - 1)))
    if op < 0.6:
        return Power(a, 2)
    if op < 0.7:
        return Quotient(a, Sum((Power(transcendental_expr(rng, depth - 1), 2), const(1))))
    if op < 0.85:
        # keep the exponent moderate on the sampling boxes
        return Exp(Quotient(a, Sum((Power(a, 2), const(1)))))
    return Log(Sum((Power(a, 2), const(1))))


def polynomial(rng: random.Random, degree: int = 3, terms: int = 4):
    out = []
    for _ in range(terms):
        i = rng.randint(0, degree)
        j = rng.randint(0, degree - i)
        c = const(Fraction(rng.randint(-5, 5), rng.choice((1, 2, 4))))
        out.append(Product((c, Power(X1, i), Power(X2, j))))
    return Sum(tuple(out))


def random_box(rng: random.Random, span: float = 3.0):
    def axis():
        a = Fraction(rng.randint(-30, 30), 10)
        w = Fraction(rng.randint(1, int(span * 10)), 10)
        return (a, a + w)

    return axis(), axis()


def random_point_in(rng: random.Random, box) -> dict:
    (a1, b1), (a2, b2) = box
    t1 = Fraction(rng.randint(0, 1000), 1000)
    t2 = Fraction(rng.randint(0, 1000), 1000)
    return {"x1": a1 + (b1 - a1) * t1, "x2": a2 + (b2 - a2) * t2}
