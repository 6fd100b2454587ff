"""Built-in systems with known Dulac functions (plus one negative control)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import Expr, normalize, parse
from .system import ParameterEnv, ParamSpec, Region, VectorField

UNIT = Region.square(Fraction(1, 10), 10)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    field: VectorField
    region: Region
    family: str | None
    expected_h: Expr | None
    expected_c: Expr | None
    location: str
    description: str = ""

    @property
    def expect_found(self) -> bool:
        return self.expected_h is not None

    @property
    def params(self) -> ParameterEnv:
        return self.field.env


def _pos(lo, hi) -> ParamSpec:
    return ParamSpec("positive", Fraction(lo), Fraction(hi))


def _fixed(v) -> ParamSpec:
    return ParamSpec.of(None, Fraction(v))


def _entry(name, f1, f2, params, region, family, h, c, location, description=""):
    F = VectorField.from_strings(f1, f2, ParameterEnv.build(params))
    return CorpusEntry(
        name,
        F,
        region,
        family,
        parse(h) if h else None,
        parse(c) if c else None,
        location,
        description,
    )


def _build() -> dict[str, CorpusEntry]:
    half_two = _pos(Fraction(1, 2), 2)
    entries = [
        _entry(
            "sis",
            "lam - mu*x1 - alpha*x2",
            "beta*(x1 - x2)*x2 - (alpha + mu + delta)*x2",
            {n: half_two for n in ("lam", "mu", "alpha", "beta", "delta")},
            UNIT,
            "SingleVar(2)",
            "1/x2",
            "-(mu + beta*x2)",
            "SIS epidemic model with disease-induced death",
            "all parameters positive, certified over [1/2, 2]",
        ),
        _entry(
            "lv-harvest",
            "x1*(r1 - k1*x1 - b12*x2) - h1*x1",
            "x2*(r2 - k2*x2 - b21*x1) - h2*x2",
            {n: half_two for n in ("r1", "r2", "k1", "k2", "b12", "b21", "h1", "h2")},
            UNIT,
            "ProductZ",
            "1/(x1*x2)",
            "-(k1*x1 + k2*x2)",
            "Lotka-Volterra competition with proportional harvesting",
            "k1, k2 > 0 keeps k1*k2 >= 0 with both nonzero",
        ),
        _entry(
            "linear-combo",
            "(alpha1*x1 + alpha2*x2)*(beta1 + beta2*x2 + sigma1*x1)",
            "(alpha1*x1 + alpha2*x2)*(beta3 + beta4*x1 + sigma2*x2)",
            {n: _fixed(1) for n in ("alpha1", "alpha2", "beta1", "beta2", "beta3", "beta4", "sigma1", "sigma2")},
            Region((Fraction(-1, 4), Fraction(10)), (Fraction(1, 2), Fraction(10))),
            "SumZ",
            "1/(x1 + x2)",
            "2*(x1 + x2)",
            "common linear factor alpha1*x1 + alpha2*x2, exponents n = m = 1, p = q = 0",
            "box crosses x1 = 0 but keeps x1 + x2 > 0",
        ),
        _entry(
            "separable-product",
            "a*x1*(b - x2)",
            "(g + x1^2)*x2*(1 + x2)",
            {n: half_two for n in ("a", "b", "g")},
            UNIT,
            "SingleVar(1)",
            "1/x1",
            "(g + x1^2)*(1 + 2*x2)",
            "separable shape x1' = r1(x1) s1(x2), x2' = r2(x1) s2(x2)",
        ),
        _entry(
            "separable-sum",
            "x1*(a - x2)",
            "b*x1 - d*x2 - x2^3",
            {n: half_two for n in ("a", "b", "d")},
            UNIT,
            "SingleVar(1)",
            "1/x1",
            "-d - 3*x2^2",
            "separable shape x1' = r1(x1) r2(x2), x2' = s1(x1) + s2(x2)",
        ),
        _entry(
            "logistic-pair",
            "x1*(a1 - x1)",
            "x2*(a2 - x2)",
            {"a1": _fixed(1), "a2": _fixed(Fraction(21, 20))},
            UNIT,
            "SingleVar(1)",
            "1/x1^2",
            "a2 - a1 - 2*x2",
            "logistic pair x_i' = x_i (a_i - x_i g_i) with g1 = g2 = 1 and a2 >= a1",
        ),
        _entry(
            "mutualism-facultative",
            "r1*x1*(1 - x1/(k1 + b12*x2))",
            "r2*x2*(1 - x2/(k2 + b21*x1))",
            {
                "r1": _fixed(1),
                "r2": _fixed(1),
                "k1": half_two,
                "k2": half_two,
                "b12": half_two,
                "b21": half_two,
            },
            UNIT,
            "SingleVar(1)",
            "1/x1^2",
            "-2*x2/(k2 + b21*x1)",
            "basic model of facultative mutualism",
            "r1 = r2 puts the system in the a2 >= a1 branch",
        ),
        _entry(
            "graves",
            "x1*((r1 + (r11 - r1)*(1 - exp(-k1*x2))) - a1*x1)",
            "x2*((r2 + (r22 - r2)*(1 - exp(-k2*x1))) - a2*x2)",
            {
                "r1": _pos(Fraction(1, 2), 1),
                "r2": _pos(Fraction(1, 2), 1),
                "r11": _pos(Fraction(3, 2), 2),
                "r22": _pos(Fraction(3, 2), 2),
                "k1": half_two,
                "k2": half_two,
                "a1": half_two,
                "a2": half_two,
            },
            UNIT,
            "ProductZ",
            "1/(x1*x2)",
            "-(a1*x1 + a2*x2)",
            "mutualism model with saturating exponential benefit",
            "r_ii > r_i holds on the declared ranges",
        ),
        _entry(
            "gopalsamy",
            "r1*x1*((k1 + a1*x2)/(1 + x2) - x1)",
            "r2*x2*((k2 + a2*x1)/(1 + x1) - x2)",
            {
                "r1": half_two,
                "r2": half_two,
                "k1": _pos(Fraction(1, 2), 1),
                "k2": _pos(Fraction(1, 2), 1),
                "a1": _pos(Fraction(3, 2), 2),
                "a2": _pos(Fraction(3, 2), 2),
            },
            UNIT,
            "ProductZ",
            "1/(x1*x2)",
            "-(r1*x1 + r2*x2)",
            "Gopalsamy mutualism model",
            "a_i > k_i holds on the declared ranges",
        ),
        _entry(
            "vanderpol",
            "x2",
            "mu*(1 - x1^2)*x2 - x1",
            {"mu": _fixed(1)},
            Region((Fraction(-3), Fraction(3)), (Fraction(-3), Fraction(3))),
            None,
            None,
            None,
            "Van der Pol oscillator (has a limit cycle)",
            "negative control: no Dulac function exists on a box around the cycle",
        ),
    ]
    return {e.name: e for e in entries}


REGISTRY = _build()


def names() -> list[str]:
    return list(REGISTRY)


def load(name: str) -> CorpusEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown corpus entry '{name}' (known: {', '.join(REGISTRY)})") from None


def entries() -> list[CorpusEntry]:
    return list(REGISTRY.values())


def expected_c_normal(entry: CorpusEntry) -> Expr | None:
    return None if entry.expected_c is None else normalize(entry.field.env.fix(entry.expected_c))


def export(name_or_entry) -> str:
    """The entry as an input file understood by the command line tool."""
    from .inputfile import format_input

    e = name_or_entry if isinstance(name_or_entry, CorpusEntry) else load(name_or_entry)
    return format_input(e.field, e.region, comment=f"{e.name}: {e.location}")
