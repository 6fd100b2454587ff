"""Planar vector fields, regions, divergence and the associated PDE residual."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .expr import (
    ONE,
    VARIABLES,
    Expr,
    IntervalBox,
    as_expr,
    differentiate,
    normalize,
    parse,
    substitute,
)

SIGNS = ("positive", "negative", "nonneg", "nonpos", "free")

# numeric range used when a parameter is declared by sign only
DEFAULT_RANGES = {
    "positive": (Fraction(1, 2), Fraction(2)),
    "negative": (Fraction(-2), Fraction(-1, 2)),
    "nonneg": (Fraction(0), Fraction(2)),
    "nonpos": (Fraction(-2), Fraction(0)),
    "free": (Fraction(-2), Fraction(2)),
}


class InvalidSystemError(ValueError):
    pass


def _sign_ok(sign: str, lo: Fraction, hi: Fraction) -> bool:
    return {
        "positive": lo > 0,
        "negative": hi < 0,
        "nonneg": lo >= 0,
        "nonpos": hi <= 0,
        "free": True,
    }[sign]


def infer_sign(lo: Fraction, hi: Fraction) -> str:
    if lo > 0:
        return "positive"
    if hi < 0:
        return "negative"
    if lo >= 0:
        return "nonneg"
    if hi <= 0:
        return "nonpos"
    return "free"


@dataclass(frozen=True)
class ParamSpec:
    sign: str
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.sign not in SIGNS:
            raise InvalidSystemError(f"unknown sign assumption '{self.sign}'")
        if self.lo > self.hi:
            raise InvalidSystemError(f"empty parameter range [{self.lo}, {self.hi}]")
        if not _sign_ok(self.sign, self.lo, self.hi):
            raise InvalidSystemError(
                f"range [{self.lo}, {self.hi}] contradicts sign assumption '{self.sign}'"
            )

    @property
    def fixed(self) -> bool:
        return self.lo == self.hi

    @classmethod
    def of(cls, sign: str | None = None, lo=None, hi=None) -> ParamSpec:
        if lo is None:
            lo, hi = DEFAULT_RANGES[sign or "free"]
        elif hi is None:
            hi = lo
        lo, hi = Fraction(lo), Fraction(hi)
        return cls(sign or infer_sign(lo, hi), lo, hi)


@dataclass(frozen=True)
class ParameterEnv:
    """Parameter name -> (sign assumption, rational range)."""

    specs: tuple[tuple[str, ParamSpec], ...] = ()

    @classmethod
    def build(cls, mapping: Mapping[str, object] | None = None) -> ParameterEnv:
        """Accepts ParamSpec, a sign string, a number, or a (lo, hi) pair per name."""
        items = []
        for name, v in sorted((mapping or {}).items()):
            if name in VARIABLES:
                raise InvalidSystemError(f"'{name}' is a state variable, not a parameter")
            if isinstance(v, ParamSpec):
                spec = v
            elif isinstance(v, str):
                spec = ParamSpec.of(v)
            elif isinstance(v, (tuple, list)):
                spec = ParamSpec.of(None, *v)
            else:
                spec = ParamSpec.of(None, v)
            items.append((name, spec))
        return cls(tuple(items))

    def __contains__(self, name) -> bool:
        return any(n == name for n, _ in self.specs)

    def __getitem__(self, name) -> ParamSpec:
        for n, s in self.specs:
            if n == name:
                return s
        raise KeyError(name)

    def names(self) -> list[str]:
        return [n for n, _ in self.specs]

    def bounds_items(self):
        return [(n, (s.lo, s.hi)) for n, s in self.specs]

    def fixed_values(self) -> dict[str, Fraction]:
        return {n: s.lo for n, s in self.specs if s.fixed}

    def ranged(self) -> tuple[tuple[str, tuple[Fraction, Fraction]], ...]:
        return tuple((n, (s.lo, s.hi)) for n, s in self.specs if not s.fixed)

    def midpoint(self) -> dict[str, Fraction]:
        return {n: (s.lo + s.hi) / 2 for n, s in self.specs}

    def fix(self, e: Expr) -> Expr:
        """Substitute parameters whose range is a single point."""
        fixed = {k: v for k, v in self.fixed_values().items() if k in e.parameters()}
        return substitute(e, fixed) if fixed else e

    def replace(self, **changes) -> ParameterEnv:
        d = dict(self.specs)
        for k, v in changes.items():
            d[k] = v
        return ParameterEnv.build(d)

    def with_all(self, lo, hi=None) -> ParameterEnv:
        return ParameterEnv.build({n: (lo, lo if hi is None else hi) for n in self.names()})


@dataclass(frozen=True)
class VectorField:
    f1: Expr
    f2: Expr
    env: ParameterEnv = field(default_factory=ParameterEnv)

    def __post_init__(self):
        object.__setattr__(self, "f1", normalize(as_expr(self.f1)))
        object.__setattr__(self, "f2", normalize(as_expr(self.f2)))
        unknown = (self.f1.symbols() | self.f2.symbols()) - set(VARIABLES) - set(self.env.names())
        if unknown:
            raise InvalidSystemError(f"undeclared parameters: {', '.join(sorted(unknown))}")

    @classmethod
    def from_strings(cls, f1: str, f2: str, params: Mapping[str, object] | None = None) -> VectorField:
        env = params if isinstance(params, ParameterEnv) else ParameterEnv.build(params)
        return cls(parse(f1), parse(f2), env)

    def components(self) -> tuple[Expr, Expr]:
        return self.f1, self.f2

    def specialized(self) -> VectorField:
        """Fixed parameters substituted by their values."""
        return VectorField(self.env.fix(self.f1), self.env.fix(self.f2), self.env)

    def with_env(self, env: ParameterEnv) -> VectorField:
        return VectorField(self.f1, self.f2, env)


@dataclass(frozen=True)
class Region:
    """Closed rectangle [a1, b1] x [a2, b2]."""

    x1: tuple[Fraction, Fraction]
    x2: tuple[Fraction, Fraction]
    kind: str = "box"

    def __post_init__(self):
        x1 = (Fraction(self.x1[0]), Fraction(self.x1[1]))
        x2 = (Fraction(self.x2[0]), Fraction(self.x2[1]))
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)
        if self.kind not in ("box", "positive-quadrant-box"):
            raise InvalidSystemError(f"unknown region kind '{self.kind}'")
        if not (x1[0] < x1[1] and x2[0] < x2[1]):
            raise InvalidSystemError("region bounds must satisfy a < b on both axes")
        if self.kind == "positive-quadrant-box" and not (x1[0] > 0 and x2[0] > 0):
            raise InvalidSystemError("positive-quadrant-box needs a1 > 0 and a2 > 0")

    @classmethod
    def positive_quadrant(cls, eps=Fraction(1, 100), big=Fraction(100)) -> Region:
        return cls((eps, big), (eps, big), "positive-quadrant-box")

    @classmethod
    def square(cls, lo, hi, kind: str | None = None) -> Region:
        lo, hi = Fraction(lo), Fraction(hi)
        if kind is None:
            kind = "positive-quadrant-box" if lo > 0 else "box"
        return cls((lo, hi), (lo, hi), kind)

    def box(self, env: ParameterEnv | None = None) -> IntervalBox:
        params = env.ranged() if env is not None else ()
        return IntervalBox(self.x1, self.x2, params)

    def center(self) -> dict[str, Fraction]:
        return {"x1": sum(self.x1) / 2, "x2": sum(self.x2) / 2}

    def describe(self) -> str:
        return f"[{self.x1[0]}, {self.x1[1]}] x [{self.x2[0]}, {self.x2[1]}]"


@dataclass(frozen=True)
class DulacCandidate:
    h: Expr
    c: Expr
    ansatz: str
    gamma: Expr | None = None
    # "search", "fast-path" or "user"
    source: str = "user"


def divergence(F: VectorField) -> Expr:
    return normalize(differentiate(F.f1, "x1") + differentiate(F.f2, "x2"))


def div_hF(F: VectorField, h: Expr) -> Expr:
    """d(h f1)/dx1 + d(h f2)/dx2, normalized."""
    h = as_expr(h)
    return normalize(differentiate(h * F.f1, "x1") + differentiate(h * F.f2, "x2"))


def lie_derivative(F: VectorField, h: Expr) -> Expr:
    return normalize(F.f1 * differentiate(h, "x1") + F.f2 * differentiate(h, "x2"))


def pde_residual(F: VectorField, cand: DulacCandidate) -> Expr:
    """f1 h_x1 + f2 h_x2 - h (c - div F), normalized."""
    h = as_expr(cand.h)
    rhs = h * (as_expr(cand.c) - divergence(F))
    return normalize(lie_derivative(F, h) - rhs)


def sampling_ranges(region: Region | None, env: ParameterEnv | None) -> dict:
    """Symbol ranges used by probabilistic zero tests."""
    out = {}
    if region is not None:
        out["x1"], out["x2"] = region.x1, region.x2
    if env is not None:
        out.update(dict(env.bounds_items()))
    return out


def all_symbols(exprs: Iterable[Expr]) -> set[str]:
    out: set[str] = set()
    for e in exprs:
        out |= e.symbols()
    return out


__all__ = [
    "DulacCandidate",
    "InvalidSystemError",
    "ONE",
    "ParamSpec",
    "ParameterEnv",
    "Region",
    "VectorField",
    "div_hF",
    "divergence",
    "infer_sign",
    "lie_derivative",
    "pde_residual",
    "sampling_ranges",
]
