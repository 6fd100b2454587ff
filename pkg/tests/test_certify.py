import random
from fractions import Fraction

import pytest

import exprgen
from dulac import corpus
from dulac.certify import (
    PoleInRegion,
    RefusedResidualNonzero,
    RefusedSignUnproved,
    certify_dulac,
    denominator_vanishes,
    prove_fixed_sign,
    prove_sign,
)
from dulac.config import Config
from dulac.expr import compile_float, eval_point, is_identically_zero, normalize, parse
from dulac.system import DulacCandidate, ParameterEnv, Region, VectorField, div_hF

UNIT = Region.square(Fraction(1, 10), 10)
SQUARE = Region.square(-1, 1)


def _violates(claim, v):
    return {"positive": v <= 0, "negative": v >= 0, "nonneg-ae": v < 0, "nonpos-ae": v > 0}[claim]


def test_prove_sign_examples():
    p = prove_sign(parse("x1^2 + x2^2"), SQUARE, None, "nonneg-ae")
    assert p.proved and p.undecided_fraction <= 1e-4

    p = prove_sign(parse("x1"), SQUARE, None, "nonneg-ae")
    assert p.disproved
    ce = p.counterexample
    assert ce.exact and ce.value < 0 and ce.as_dict()["x1"] < 0

    p = prove_sign(parse("-(1 + x2)/x2"), UNIT, None, "negative")
    assert p.proved and not p.undecided


def test_prove_sign_strict_claim_has_no_thin_allowance():
    p = prove_sign(parse("x1^2 + x2^2"), SQUARE, None, "positive")
    assert p.disproved
    assert p.counterexample.value == 0


def test_prove_sign_identically_zero_is_disproved():
    p = prove_sign(parse("(x1 + x2)^2 - x1^2 - 2*x1*x2 - x2^2"), SQUARE, None, "nonneg-ae")
    assert p.disproved and p.reason == "identically zero"


def test_prove_sign_over_parameter_intervals():
    env = ParameterEnv.build({"a": (Fraction(1, 2), 2)})
    assert prove_sign(parse("-a*x2 - 1"), UNIT, env, "negative").proved
    p = prove_sign(parse("a - x1"), UNIT, env, "negative")
    assert p.disproved
    assert eval_point(parse("a - x1"), p.counterexample.as_dict()) >= 0


def test_prove_sign_pole_is_not_proved():
    p = prove_sign(parse("1/x1"), SQUARE, None, "positive")
    assert p.disproved
    p = prove_sign(parse("1/(x1^2)"), SQUARE, None, "positive")
    assert not p.proved and p.pole
    assert denominator_vanishes(parse("1/x1"), SQUARE, ParameterEnv(), Config())
    assert not denominator_vanishes(parse("1/(x1^2 + 1)"), SQUARE, ParameterEnv(), Config())


def test_prove_fixed_sign_prefers_strict_claim():
    assert prove_fixed_sign(parse("-1 - x2"), UNIT, ParameterEnv(), Config()).claim == "negative"
    assert prove_fixed_sign(parse("x1^2 + x2^2"), SQUARE, ParameterEnv(), Config()).claim == "nonneg-ae"


def test_unknown_when_depth_too_small():
    # positive but touches zero tangentially near the corner; coarse depth cannot decide
    p = prove_sign(parse("(x1 - x2)^2 + 1/1000"), SQUARE, None, "positive", Config(max_depth=2))
    assert p.status in ("Unknown", "Proved")
    assert not p.disproved


def test_disproved_counterexamples_violate_exactly():
    rng = random.Random(5)
    seen = 0
    for _ in range(40):
        e = exprgen.polynomial(rng, 3, 4)
        box = exprgen.random_box(rng)
        region = Region(*box)
        claim = rng.choice(("positive", "negative", "nonneg-ae", "nonpos-ae"))
        p = prove_sign(e, region, None, claim, Config(max_depth=10))
        if p.disproved and p.reason != "identically zero":
            seen += 1
            assert p.counterexample.exact
            pt = p.counterexample.as_dict()
            assert region.x1[0] <= pt["x1"] <= region.x1[1]
            assert region.x2[0] <= pt["x2"] <= region.x2[1]
            assert _violates(claim, eval_point(e, pt))
    assert seen >= 10


SOUND_CASES = [
    ("-(1 + x2)/x2", UNIT),
    ("-1 - x2 - x1*x2/(x1^2 + 1)", UNIT),
    ("-(x1 - x2)^2 - 1/100", SQUARE),
    ("x1*x2 - 2 - x1^2", SQUARE),
    ("-exp(x1) + x2 - 3", SQUARE),
]


@pytest.mark.parametrize("text,region", SOUND_CASES)
def test_proved_negative_is_sound(text, region):
    e = parse(text)
    p = prove_sign(e, region, None, "negative")
    assert p.proved
    f = compile_float(e)
    rng = random.Random(17)
    (a1, b1), (a2, b2) = region.x1, region.x2
    for _ in range(10_000):
        x = {"x1": rng.uniform(float(a1), float(b1)), "x2": rng.uniform(float(a2), float(b2))}
        if any(b.contains(x) for b in p.undecided):
            continue
        assert f(x) < 0, x


def test_proved_nonpos_ae_is_sound_outside_thin_boxes():
    e = parse("-(x1^2 + x2^2)")
    p = prove_sign(e, SQUARE, None, "nonpos-ae")
    assert p.proved
    f = compile_float(e)
    rng = random.Random(3)
    for _ in range(10_000):
        x = {"x1": rng.uniform(-1, 1), "x2": rng.uniform(-1, 1)}
        if not any(b.contains(x) for b in p.undecided):
            assert f(x) < 0


def test_monotone_budget():
    """Raising max_depth never flips Proved and Disproved."""
    rng = random.Random(2024)
    resolved = 0
    for _ in range(20):
        e = exprgen.polynomial(rng, 3, rng.randint(2, 5))
        region = Region(*exprgen.random_box(rng))
        claim = rng.choice(("positive", "negative", "nonneg-ae", "nonpos-ae"))
        statuses = [prove_sign(e, region, None, claim, Config(max_depth=d)).status for d in (4, 8, 12, 16)]
        final = {s for s in statuses if s != "Unknown"}
        assert len(final) <= 1, statuses
        # once resolved, deeper budgets stay resolved the same way
        for a, b in zip(statuses, statuses[1:]):
            if a != "Unknown":
                assert b == a, statuses
        resolved += bool(final)
    assert resolved >= 10


# -- certify_dulac ---------------------------------------------------------------------


def sis_ones():
    return VectorField.from_strings(
        "lam - mu*x1 - alpha*x2",
        "beta*(x1 - x2)*x2 - (alpha + mu + delta)*x2",
        {n: 1 for n in ("lam", "mu", "alpha", "beta", "delta")},
    )


def test_certify_sis():
    cert = certify_dulac(sis_ones(), DulacCandidate(parse("1/x2"), parse("-(1 + x2)"), "t"), UNIT)
    assert cert.sign == "negative"
    assert cert.k_proof.proved and cert.h_proof.proved and cert.c_proof.proved
    assert cert.residual_mode == "exact"
    assert "no periodic orbits" in cert.conclusion and "[1/10, 10]" in cert.conclusion
    assert is_identically_zero(cert.k - cert.h * cert.c)


def test_certify_gopalsamy_point_parameters():
    F = VectorField.from_strings(
        "r1*x1*((k1 + a1*x2)/(1 + x2) - x1)",
        "r2*x2*((k2 + a2*x1)/(1 + x1) - x2)",
        {"r1": 1, "r2": 1, "k1": 1, "k2": 1, "a1": 2, "a2": 2},
    )
    # by hand: d/dx1 [f1/(x1 x2)] = -r1/x2, so k = -(r1/x2 + r2/x1) and c = k*x1*x2
    cert = certify_dulac(F, DulacCandidate(parse("1/(x1*x2)"), parse("-(x1 + x2)"), "t"), UNIT)
    assert cert.sign == "negative"
    assert cert.k == parse("-(x1 + x2)/(x1*x2)")
    assert is_identically_zero(cert.k - cert.h * cert.c)


def test_certify_refuses_hamiltonian_center():
    F = VectorField.from_strings("x2", "-x1")
    with pytest.raises(RefusedSignUnproved) as info:
        certify_dulac(F, DulacCandidate(parse("1"), parse("0"), "t"), SQUARE)
    assert info.value.proof.disproved and info.value.proof.reason == "identically zero"


def test_certify_refuses_wrong_cofactor():
    with pytest.raises(RefusedResidualNonzero):
        certify_dulac(sis_ones(), DulacCandidate(parse("1/x2"), parse("-1"), "t"), UNIT)


def test_certify_refuses_pole():
    F = sis_ones()
    region = Region((Fraction(1, 10), 10), (-1, 1))
    with pytest.raises(PoleInRegion):
        certify_dulac(F, DulacCandidate(parse("1/x2"), parse("-(1 + x2)"), "t"), region)


def test_certify_refuses_unproved_k_sign():
    F = sis_ones()
    with pytest.raises(RefusedSignUnproved) as info:
        certify_dulac(F, DulacCandidate(parse("1"), parse("x1 - 2*x2 - 4"), "t"), UNIT)
    assert info.value.what == "c"
    assert info.value.proof.disproved


@pytest.mark.parametrize("name", [e.name for e in corpus.entries() if e.expected_h is not None])
def test_corpus_certificates_satisfy_k_equals_hc(name):
    e = corpus.load(name)
    c = e.expected_c
    if c is None:
        c = normalize(div_hF(e.field, e.expected_h) / e.expected_h)
    cert = certify_dulac(e.field, DulacCandidate(e.expected_h, c, "t"), e.region)
    assert is_identically_zero(cert.k - cert.h * cert.c)
    assert cert.residual_max <= 1e-9
