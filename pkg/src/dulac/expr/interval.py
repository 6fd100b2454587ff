"""Outward-rounded floating point intervals and rational boxes.

Every float operation is followed by a one-ulp step away from the enclosed
set (two ulps for exp/log, whose libm error is not guaranteed to be below
one ulp), so computed intervals always contain the exact real result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

INF = math.inf


class IntervalDomainError(ArithmeticError):
    """The enclosure reaches outside the domain of an operation; split the box."""


class PossibleDivisionByZero(IntervalDomainError):
    pass


class PossibleLogNonpositive(IntervalDomainError):
    pass


def _down(x: float) -> float:
    return math.nextafter(x, -INF)


def _up(x: float) -> float:
    return math.nextafter(x, INF)


def _sum_err(a: float, b: float, s: float) -> float:
    # TwoSum: a + b == s + err exactly (finite inputs)
    bb = s - a
    return (a - (s - bb)) + (b - bb)


def _add_down(a: float, b: float) -> float:
    s = a + b
    if math.isfinite(s) and _sum_err(a, b, s) >= 0.0:
        return s
    return _down(s)


def _add_up(a: float, b: float) -> float:
    s = a + b
    if math.isfinite(s) and _sum_err(a, b, s) <= 0.0:
        return s
    return _up(s)


def _mul_down(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    return _down(a * b)


def _mul_up(a: float, b: float) -> float:
    if a == 0.0 or b == 0.0:
        return 0.0
    return _up(a * b)


def fraction_bounds(q: Fraction) -> tuple[float, float]:
    """Tightest float interval containing the rational ``q``."""
    f = float(q)
    exact = Fraction(f)
    lo = f if exact <= q else _down(f)
    hi = f if exact >= q else _up(f)
    return lo, hi


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        self.lo = lo
        self.hi = lo if hi is None else hi

    @classmethod
    def from_fractions(cls, lo: Fraction, hi: Fraction) -> Interval:
        return cls(fraction_bounds(lo)[0], fraction_bounds(hi)[1])

    @classmethod
    def point(cls, q: Fraction) -> Interval:
        return cls(*fraction_bounds(q))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def __add__(self, o: Interval) -> Interval:
        return Interval(_add_down(self.lo, o.lo), _add_up(self.hi, o.hi))

    def __sub__(self, o: Interval) -> Interval:
        return Interval(_add_down(self.lo, -o.hi), _add_up(self.hi, -o.lo))

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __mul__(self, o: Interval) -> Interval:
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        prods = (a * c, a * d, b * c, b * d)
        if any(math.isnan(p) for p in prods):
            # 0 * inf: the enclosure is unbounded
            return Interval(-INF, INF)
        lo = min(_mul_down(x, y) for x, y in ((a, c), (a, d), (b, c), (b, d)))
        hi = max(_mul_up(x, y) for x, y in ((a, c), (a, d), (b, c), (b, d)))
        return Interval(lo, hi)

    def reciprocal(self) -> Interval:
        if self.lo <= 0.0 <= self.hi:
            raise PossibleDivisionByZero(f"denominator enclosure {self!r} contains 0")
        return Interval(_down(1.0 / self.hi), _up(1.0 / self.lo))

    def __truediv__(self, o: Interval) -> Interval:
        return self * o.reciprocal()

    def __pow__(self, n: int) -> Interval:
        if n < 0:
            return (self ** (-n)).reciprocal()
        if n == 0:
            return Interval(1.0, 1.0)
        if n % 2 == 1:
            return Interval(_pow_down(self.lo, n), _pow_up(self.hi, n))
        if self.lo >= 0.0:
            return Interval(_pow_down(self.lo, n), _pow_up(self.hi, n))
        if self.hi <= 0.0:
            return Interval(_pow_down(-self.hi, n), _pow_up(-self.lo, n))
        return Interval(0.0, _pow_up(max(-self.lo, self.hi), n))

    def exp(self) -> Interval:
        lo = max(0.0, _down(_down(_safe_exp(self.lo))))
        return Interval(lo, _up(_up(_safe_exp(self.hi))))

    def log(self) -> Interval:
        if self.lo <= 0.0:
            raise PossibleLogNonpositive(f"log argument enclosure {self!r} reaches 0")
        hi = INF if self.hi == INF else _up(_up(math.log(self.hi)))
        return Interval(_down(_down(math.log(self.lo))), hi)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return INF


def _pow_up(x: float, n: int) -> float:
    # x**n rounded towards +inf, by repeated multiplication
    if x >= 0.0:
        r = 1.0
        for _ in range(n):
            r = _up(r * x)
        return r
    # odd n, negative base: -(|x|^n rounded down)
    return -_pow_down(-x, n)


def _pow_down(x: float, n: int) -> float:
    if x >= 0.0:
        r = 1.0
        for _ in range(n):
            r = _down(r * x)
        return max(r, 0.0)
    return -_pow_up(-x, n)


Bounds = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class IntervalBox:
    """Axis-aligned box with rational endpoints.

    ``x1``/``x2`` bound the state variables; ``params`` holds parameter
    ranges (degenerate ranges are fixed values and never bisected).
    """

    x1: Bounds
    x2: Bounds
    params: tuple[tuple[str, Bounds], ...] = ()
    depth: int = 0

    def __post_init__(self):
        for name, (lo, hi) in self.axes():
            if lo > hi:
                raise ValueError(f"empty box on axis {name}: [{lo}, {hi}]")

    def axes(self) -> Iterator[tuple[str, Bounds]]:
        yield "x1", self.x1
        yield "x2", self.x2
        yield from self.params

    def bounds(self, name: str) -> Bounds:
        for n, b in self.axes():
            if n == name:
                return b
        raise KeyError(name)

    def split_axes(self) -> list[str]:
        return [n for n, (lo, hi) in self.axes() if hi > lo]

    def widths(self) -> dict[str, Fraction]:
        return {n: hi - lo for n, (lo, hi) in self.axes()}

    def volume(self) -> Fraction:
        v = Fraction(1)
        for n, (lo, hi) in self.axes():
            if hi > lo:
                v *= hi - lo
        return v

    def center(self) -> dict[str, Fraction]:
        return {n: (lo + hi) / 2 for n, (lo, hi) in self.axes()}

    def intervals(self) -> dict[str, Interval]:
        return {n: Interval.from_fractions(lo, hi) for n, (lo, hi) in self.axes()}

    def longest_axis(self) -> str:
        # ties go to the earliest axis (x1, then x2, then parameters in order)
        best, width = None, Fraction(-1)
        for n, (lo, hi) in self.axes():
            if hi - lo > width:
                best, width = n, hi - lo
        return best

    def bisect(self, axis: str | None = None) -> tuple[IntervalBox, IntervalBox]:
        axis = axis or self.longest_axis()
        lo, hi = self.bounds(axis)
        mid = (lo + hi) / 2
        return self._with(axis, (lo, mid)), self._with(axis, (mid, hi))

    def _with(self, axis: str, b: Bounds) -> IntervalBox:
        if axis == "x1":
            return IntervalBox(b, self.x2, self.params, self.depth + 1)
        if axis == "x2":
            return IntervalBox(self.x1, b, self.params, self.depth + 1)
        params = tuple((n, b if n == axis else v) for n, v in self.params)
        return IntervalBox(self.x1, self.x2, params, self.depth + 1)

    def contains(self, point: dict) -> bool:
        return all(lo <= point[n] <= hi for n, (lo, hi) in self.axes() if n in point)

    def quadruple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x1[0], self.x1[1], self.x2[0], self.x2[1])
