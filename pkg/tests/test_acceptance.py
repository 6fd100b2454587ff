"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""

import json
import time
from fractions import Fraction

import pytest

import test_ansatz
import test_certify
import test_expr
from dulac import corpus
from dulac.ansatz import dependence_ratio, search
from dulac.cli import EXIT_DISPROVED, main
from dulac.config import Config
from dulac.expr import X1, X2, Z, eval_point, is_identically_zero, normalize, parse
from dulac.system import VectorField, divergence, pde_residual


@pytest.fixture
def verdict(capsys):
    def emit(n, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'}: {title}{' | ' + detail if detail else ''}")
        assert ok, detail

    return emit


def _timed_search(F, region, cfg):
    t0 = time.perf_counter()
    r = search(F, region, cfg)
    return r, time.perf_counter() - t0


def test_1_sis_reproduction(verdict):
    F = VectorField.from_strings(
        "lam - mu*x1 - alpha*x2",
        "beta*(x1 - x2)*x2 - (alpha + mu + delta)*x2",
        {n: 1 for n in ("lam", "mu", "alpha", "beta", "delta")},
    )
    r, dt = _timed_search(F, corpus.load("sis").region, Config(max_depth=16))
    ok = r.found
    if ok:
        cert = r.certificate
        ratio = normalize(cert.h * X2)
        ok = (
            ratio.symbols() == set()
            and eval_point(ratio, {}) > 0
            and cert.c == normalize(F.env.fix(parse("-(mu + beta*x2)")))
            and cert.k_proof.claim == "negative"
            and cert.k_proof.proved
            and dt < 5
        )
    verdict(1, "SIS: h*x2 constant, c = -(mu + beta*x2), k < 0 proved, < 5 s", ok, f"{dt:.2f} s")


def test_2_lotka_volterra_harvest(verdict):
    e = corpus.load("lv-harvest")
    specs = dict(e.field.env.specs)
    intervals = all(s.lo == Fraction(1, 2) and s.hi == 2 for s in specs.values())
    r, dt = _timed_search(e.field, e.region, Config())
    ok = intervals and r.found
    if ok:
        cert = r.certificate
        ok = (
            cert.candidate.ansatz == "ProductZ"
            and normalize(cert.h * X1 * X2).symbols() == set()
            and is_identically_zero(cert.c - parse("-(k1*x1 + k2*x2)"))
            and cert.k_proof.proved
            and dt < 10
        )
    verdict(2, "LV harvest: ProductZ, h ~ 1/(x1 x2), c = -(k1 x1 + k2 x2) over [1/2, 2] params, < 10 s", ok, f"{dt:.2f} s")


def test_3_linear_combination(verdict):
    e = corpus.load("linear-combo")
    r = search(e.field, e.region, Config())
    ok = r.found
    detail = ""
    if ok:
        cert = r.certificate
        a = next(x for x in _families() if x.label == cert.candidate.ansatz)
        eps = dependence_ratio(e.field.specialized(), cert.c, a)
        detail = f"{cert.candidate.ansatz}, eps = {eps}"
        ok = (
            cert.candidate.ansatz.startswith(("SumZ", "LinearZ"))
            and normalize(cert.h * (X1 + X2)).symbols() == set()
            and is_identically_zero(eps + parse("1/(x1 + x2)"))
            and cert.candidate.gamma == normalize(-1 / Z)
        )
    verdict(3, "linear combination instance: h ~ 1/(x1 + x2), eps = -1/(x1 + x2)", ok, detail)


def _families():
    from dulac.ansatz import builtin_ansatze

    return builtin_ansatze(Config())


PATTERNS = ["logistic-pair", "mutualism-facultative", "graves", "gopalsamy", "separable-product", "separable-sum"]


@pytest.mark.parametrize("name", PATTERNS)
def test_4_corpus_patterns(verdict, name):
    e = corpus.load(name)
    r = search(e.field, e.region, Config())
    ok = r.found
    detail = ""
    if ok:
        cert = r.certificate
        detail = f"h = {cert.h}, residual {cert.residual_max:.2g}"
        if e.expected_h is not None:
            ratio = normalize(cert.h / e.field.env.fix(e.expected_h))
            ok = ratio.symbols() == set() and eval_point(ratio, {}) > 0
        ok = (
            ok
            and is_identically_zero(pde_residual(cert.field, cert.candidate))
            and cert.residual_max <= 1e-9
            and cert.k_proof.proved
        )
    verdict(4, f"{name}: expected h pattern, residual exact and <= 1e-9", ok, detail)


def test_5_negative_control(verdict, tmp_path, capsys):
    e = corpus.load("vanderpol")
    r = search(e.field, e.region, Config())
    path = tmp_path / "vdp.toml"
    main(["corpus", "export", "vanderpol", "-o", str(path)])
    js = tmp_path / "vdp.json"
    code = main(["verify", str(path), "--h", "1", "--json", str(js)])
    capsys.readouterr()
    block = json.loads(js.read_text())
    ce = block["counterexample"]
    ok = not r.found and code == EXIT_DISPROVED and block["status"] == "Disproved" and ce and ce["exact"]
    detail = ""
    if ok:
        point = {k: Fraction(v) for k, v in ce["point"].items()}
        div = e.field.env.fix(divergence(e.field))
        v = eval_point(div, point)
        origin = eval_point(div, {"x1": Fraction(0), "x2": Fraction(0)})
        # div F = 1 - x1^2 is positive at the origin, so a nonpositive value means a sign change
        ok = isinstance(v, Fraction) and v < 0 < origin and Fraction(ce["value"]) == v
        detail = f"div F = {v} at ({point['x1']}, {point['x2']})"
    verdict(5, "van der Pol: NotFound, verify h = 1 Disproved with exact counterexample", ok, detail)


SUITES = {
    "a": ("derivative vs centered differences, 200 expressions", test_expr.test_derivative_matches_finite_differences),
    "b": ("interval soundness, 10,000 triples", test_expr.test_interval_soundness_10000_triples),
    "c": ("dependence test vs level-set oracle, 50 expressions", test_ansatz.test_dependence_test_agrees_with_level_set_oracle),
    "d": ("prove_sign monotone budget, 20 polynomials", test_certify.test_monotone_budget),
}


@pytest.mark.parametrize("key", sorted(SUITES))
def test_6_property_suites(verdict, key):
    title, fn = SUITES[key]
    try:
        fn()
        ok, detail = True, ""
    except AssertionError as exc:
        ok, detail = False, str(exc)[:200]
    verdict(6, f"({key}) {title}", ok, detail)


@pytest.mark.parametrize("name", corpus.names())
def test_7_determinism(verdict, tmp_path, capsys, name):
    path = tmp_path / f"{name}.toml"
    main(["corpus", "export", name, "-o", str(path)])
    capsys.readouterr()
    outs = []
    for workers in ("1", "1", "4", "4"):
        main(["search", str(path), "--seed", "11", "--workers", workers, "--transcript"])
        outs.append(capsys.readouterr().out)
    ok = all(o == outs[0] for o in outs) and outs[0].strip() != ""
    verdict(7, f"{name}: byte-identical reports across runs and worker counts", ok)

