"""Tunable limits shared by the prover and the search."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

DEFAULT_KAPPA_GRID = tuple(
    Fraction(k) for k in (-1, 1, -2, 2, -3, 3, -4, 4, Fraction(-1, 2), Fraction(1, 2))
)
DEFAULT_LINEAR_GRID = ((1, -1), (1, 2), (2, 1), (1, -2), (2, -1))
FAMILY_ORDER = ("SingleVar(1)", "SingleVar(2)", "ProductZ", "SumZ", "LinearZ", "QuotientZ")
TEMPLATE_FORMS = ("inv", "const", "mixed", "poly")


@dataclass(frozen=True)
class Config:
    max_depth: int = 24
    rho: float = 1e-4
    delta_zero: float = 1e-3
    # hard cap on boxes per branch-and-bound run; hitting it yields Unknown
    max_boxes: int = 40_000
    # random points tried before branch-and-bound when hunting counterexamples
    samples: int = 64
    zero_samples: int = 64
    seed: int = 0
    kappa_grid: tuple[Fraction, ...] = DEFAULT_KAPPA_GRID
    linear_grid: tuple[tuple[int, int], ...] = DEFAULT_LINEAR_GRID
    families: tuple[str, ...] | None = None
    template_forms: tuple[str, ...] = TEMPLATE_FORMS
    exhaustive: bool = False
    workers: int = 1
    max_candidates: int | None = None
    residual_points: int = 100
    residual_tol: float = 1e-9
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def with_(self, **changes) -> Config:
        return replace(self, **changes)


def parse_kappa_grid(text: str) -> tuple[Fraction, ...]:
    """'±1,±2,1/2' -> (-1, 1, -2, 2, 1/2); '+-' is accepted for '±'."""
    out: list[Fraction] = []
    for item in text.replace("+-", "±").split(","):
        item = item.strip()
        if not item:
            continue
        if item.startswith("±"):
            v = Fraction(item[1:])
            out.extend([-v, v])
        else:
            out.append(Fraction(item))
    if not out:
        raise ValueError("empty kappa grid")
    return tuple(dict.fromkeys(out))
