"""Identically-zero test.

Rational expressions are decided exactly by their normal form.  When the
cancelled numerator still mentions exp/log atoms the atoms might be
algebraically dependent (``exp(a)*exp(b) - exp(a + b)``), so the numerator
is sampled at random rational points with high-precision arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .evaluate import WORK_DPS, EvaluationDomainError, eval_point
from .nodes import Expr, Sum
from .rational import RationalForm

DEFAULT_SAMPLES = 64
# symbols without a declared range are sampled from this interval
DEFAULT_RANGE = (Fraction(1, 3), Fraction(3))


class ZeroTestError(RuntimeError):
    """Too many sample points fell outside the expression's domain."""


@dataclass(frozen=True)
class ZeroTest:
    is_zero: bool
    exact: bool
    samples: int = 0

    def __bool__(self):
        return self.is_zero

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "probabilistic"


def _random_fraction(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    if lo == hi:
        return lo
    t = Fraction(rng.randrange(1, 1 << 20), 1 << 20)
    return lo + (hi - lo) * t


def zero_test(
    e: Expr,
    ranges: dict[str, tuple[Fraction, Fraction]] | None = None,
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> ZeroTest:
    """Decide whether ``e`` vanishes identically.

    ``ranges`` maps symbol names to rational sampling intervals (variables
    from the region, parameters from their declared ranges).
    """
    rf = RationalForm.from_expr(e)
    if rf.is_zero:
        return ZeroTest(True, True)
    if rf.is_rational():
        return ZeroTest(False, True)
    num = rf.numerator_expr()
    terms = num.terms if isinstance(num, Sum) else (num,)
    symbols = sorted(num.symbols())
    ranges = ranges or {}
    rng = random.Random(seed)
    done, attempts = 0, 0
    with mpmath.workdps(WORK_DPS):
        while done < samples:
            attempts += 1
            if attempts > 4 * samples:
                raise ZeroTestError(f"could not find {samples} valid sample points for {e}")
            point = {s: _random_fraction(rng, *ranges.get(s, DEFAULT_RANGE)) for s in symbols}
            try:
                values = [_to_mpf(eval_point(t, point)) for t in terms]
            except EvaluationDomainError:
                continue
            total = mpmath.fsum(values)
            scale = mpmath.fsum(abs(v) for v in values)
            if abs(total) > mpmath.mpf(10) ** (15 - WORK_DPS) * max(scale, 1):
                return ZeroTest(False, False, done + 1)
            done += 1
    return ZeroTest(True, False, done)


def _to_mpf(v):
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def is_identically_zero(e: Expr, ranges=None, *, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> bool:
    return zero_test(e, ranges, samples=samples, seed=seed).is_zero
