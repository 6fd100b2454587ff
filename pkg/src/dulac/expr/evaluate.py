"""Point, float and interval evaluation."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import mpmath

from .interval import Interval, IntervalBox, IntervalDomainError, PossibleDivisionByZero
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

# working precision (decimal digits) for points that involve exp/log
WORK_DPS = 60


class EvaluationDomainError(ArithmeticError):
    """Division by zero or log of a nonpositive number at a point."""

    def __init__(self, subterm: Expr, reason: str):
        super().__init__(f"{reason} in subterm {subterm}")
        self.subterm = subterm
        self.reason = reason


def _lookup(values: Mapping, name: str):
    try:
        return values[name]
    except KeyError:
        raise KeyError(f"no value for symbol '{name}'") from None


def eval_point(e: Expr, values: Mapping[str, object]):
    """Evaluate at a point.

    Returns an exact ``Fraction`` when ``e`` is rational and all values are
    rational, otherwise an ``mpmath.mpf`` computed with ``WORK_DPS`` digits.
    """
    with mpmath.workdps(WORK_DPS):
        return _eval(e, values)


def _mp(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return v


def _add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return _mp(a) + _mp(b)


def _mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return _mp(a) * _mp(b)


def _eval(e: Expr, values):
    if isinstance(e, RationalConstant):
        return e.value
    if isinstance(e, (Variable, Parameter)):
        v = _lookup(values, e.name)
        if isinstance(v, (int, Fraction)):
            return Fraction(v)
        return mpmath.mpf(v)
    if isinstance(e, Sum):
        acc = Fraction(0)
        for t in e.terms:
            acc = _add(acc, _eval(t, values))
        return acc
    if isinstance(e, Product):
        acc = Fraction(1)
        for f in e.factors:
            acc = _mul(acc, _eval(f, values))
        return acc
    if isinstance(e, Power):
        b = _eval(e.base, values)
        if e.exponent < 0 and b == 0:
            raise EvaluationDomainError(e, "division by zero")
        return b**e.exponent
    if isinstance(e, Quotient):
        d = _eval(e.den, values)
        if d == 0:
            raise EvaluationDomainError(e.den, "division by zero")
        n = _eval(e.num, values)
        if isinstance(n, Fraction) and isinstance(d, Fraction):
            return n / d
        return _mp(n) / _mp(d)
    if isinstance(e, Exp):
        return mpmath.exp(_mp(_eval(e.arg, values)))
    if isinstance(e, Log):
        a = _eval(e.arg, values)
        if a <= 0:
            raise EvaluationDomainError(e.arg, "log of nonpositive value")
        return mpmath.log(_mp(a))
    raise TypeError(f"unknown node {type(e).__name__}")


# -- compiled float evaluation -------------------------------------------------

FloatFn = Callable[[Mapping[str, float]], float]


def _fdiv(a, b):
    return a / b


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@lru_cache(maxsize=4096)
def compile_float(e: Expr) -> FloatFn:
    """Plain double-precision evaluator; raises ZeroDivisionError/ValueError on poles."""
    if isinstance(e, RationalConstant):
        c = float(e.value)
        return lambda v: c
    if isinstance(e, (Variable, Parameter)):
        name = e.name
        return lambda v: v[name]
    if isinstance(e, Sum):
        fs = [compile_float(t) for t in e.terms]
        return lambda v: math.fsum(f(v) for f in fs)
    if isinstance(e, Product):
        fs = [compile_float(t) for t in e.factors]

        def prod(v):
            acc = 1.0
            for f in fs:
                acc *= f(v)
            return acc

        return prod
    if isinstance(e, Power):
        f, n = compile_float(e.base), e.exponent
        return lambda v: f(v) ** n
    if isinstance(e, Quotient):
        fn, fd = compile_float(e.num), compile_float(e.den)
        return lambda v: _fdiv(fn(v), fd(v))
    if isinstance(e, Exp):
        f = compile_float(e.arg)
        return lambda v: _safe_exp(f(v))
    if isinstance(e, Log):
        f = compile_float(e.arg)
        return lambda v: math.log(f(v))
    raise TypeError(f"unknown node {type(e).__name__}")


def eval_float(e: Expr, values: Mapping[str, float]) -> float:
    """Float value, or nan where ``e`` is undefined."""
    try:
        return compile_float(e)(values)
    except (ZeroDivisionError, ValueError, OverflowError):
        return math.nan


# -- compiled interval evaluation ----------------------------------------------

IntervalFn = Callable[[Mapping[str, Interval]], Interval]


@lru_cache(maxsize=4096)
def compile_interval(e: Expr) -> IntervalFn:
    """Natural interval extension of ``e``."""
    if isinstance(e, RationalConstant):
        c = Interval.point(e.value)
        return lambda v: c
    if isinstance(e, (Variable, Parameter)):
        name = e.name
        return lambda v: v[name]
    if isinstance(e, Sum):
        fs = [compile_interval(t) for t in e.terms]

        def add(v):
            acc = fs[0](v)
            for f in fs[1:]:
                acc = acc + f(v)
            return acc

        return add
    if isinstance(e, Product):
        fs = [compile_interval(t) for t in e.factors]

        def mul(v):
            acc = fs[0](v)
            for f in fs[1:]:
                acc = acc * f(v)
            return acc

        return mul
    if isinstance(e, Power):
        f, n = compile_interval(e.base), e.exponent
        return lambda v: f(v) ** n
    if isinstance(e, Quotient):
        fn, fd = compile_interval(e.num), compile_interval(e.den)

        def div(v):
            d = fd(v)
            if d.contains_zero():
                raise PossibleDivisionByZero(f"enclosure of {e.den} contains 0")
            return fn(v) / d

        return div
    if isinstance(e, Exp):
        f = compile_interval(e.arg)
        return lambda v: f(v).exp()
    if isinstance(e, Log):
        f = compile_interval(e.arg)
        return lambda v: f(v).log()
    raise TypeError(f"unknown node {type(e).__name__}")


@lru_cache(maxsize=4096)
def _partial(e: Expr, name: str) -> Expr:
    from .calculus import differentiate

    return differentiate(e, name)


def eval_interval(e: Expr, box: IntervalBox, env=None, *, monotonic: bool = True) -> Interval:
    """Enclosure of ``e`` over ``box``.

    Parameters missing from the box are taken from ``env`` (a ParameterEnv or
    a mapping name -> (lo, hi)).  With ``monotonic`` set, every axis on which
    the enclosure of the partial derivative has a fixed sign is pinned to the
    minimizing/maximizing face, and the result is intersected with the
    natural extension.
    """
    values = box.intervals()
    if env is not None:
        for name, (lo, hi) in _env_bounds(env):
            values.setdefault(name, Interval.from_fractions(lo, hi))
    return interval_enclosure(e, values, monotonic=monotonic)


def interval_enclosure(e: Expr, values: Mapping[str, Interval], *, monotonic: bool = True) -> Interval:
    f = compile_interval(e)
    base = f(values)
    if not monotonic:
        return base
    low, high = dict(values), dict(values)
    pinned = False
    for name in sorted(e.symbols()):
        iv = values[name]
        if iv.lo == iv.hi:
            continue
        try:
            d = compile_interval(_partial(e, name))(values)
        except IntervalDomainError:
            continue
        if d.lo >= 0.0:
            low[name], high[name] = Interval(iv.lo), Interval(iv.hi)
        elif d.hi <= 0.0:
            low[name], high[name] = Interval(iv.hi), Interval(iv.lo)
        else:
            continue
        pinned = True
    if not pinned:
        return base
    return Interval(max(base.lo, f(low).lo), min(base.hi, f(high).hi))


def _env_bounds(env):
    if hasattr(env, "bounds_items"):
        return env.bounds_items()
    return env.items()
