"""Ansatz families, gamma templates and the Dulac function search.

For an ansatz h = H(z) the associated equation reduces to
``(log H)'(z) = gamma(z)`` with ``gamma = (c - div F) / D`` and
``D = f1 dz/dx1 + f2 dz/dx2``.  The search runs the other way round: pick a
family and a closed-form gamma, set ``c = div F + gamma(z) D``, and hand the
resulting (h, c) pair to the certifier.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .certify import (
    Certificate,
    CertificationRefused,
    SignProof,
    certify_dulac,
    prove_fixed_sign,
    prove_sign,
)
from .config import DEFAULT_LINEAR_GRID, Config
from .expr import (
    ONE,
    X1,
    X2,
    ZERO,
    Z,
    Exp,
    Expr,
    Log,
    Parameter,
    Power,
    Quotient,
    RationalConstant,
    Sum,
    Variable,
    ZeroTestError,
    as_expr,
    compile_float,
    const,
    differentiate,
    normalize,
    rational_form,
    substitute,
    to_text,
    zero_test,
)
from .system import (
    DulacCandidate,
    ParameterEnv,
    Region,
    VectorField,
    divergence,
    sampling_ranges,
)

SECTION_FALLBACK = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3))
BUILTIN_FAMILIES = ("SingleVar", "ProductZ", "SumZ", "LinearZ", "QuotientZ")


class DegenerateDenominator(ValueError):
    pass


class SectionOutsideDomain(ValueError):
    pass


class VerificationFailed(ValueError):
    pass


class UnsupportedGamma(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    def __init__(self, message: str, transcript=()):
        super().__init__(message)
        self.transcript = tuple(transcript)


# -- families ---------------------------------------------------------------


@dataclass(frozen=True)
class Ansatz:
    """h = H(z) for a fixed z(x1, x2).

    ``args`` holds the family arguments: the variable index for SingleVar,
    (c1, c2) for LinearZ, and the user functions for the general families.
    """

    family: str
    z: Expr
    args: tuple = ()

    @property
    def label(self) -> str:
        if self.family == "SingleVar":
            return f"SingleVar({self.args[0]})"
        if self.family == "LinearZ":
            return f"LinearZ({self.args[0]},{self.args[1]})"
        if self.family in ("GeneralProduct", "GeneralSum"):
            return f"{self.family}({to_text(self.args[0])}, {to_text(self.args[1])})"
        if self.family == "GeneralZ":
            return f"GeneralZ({to_text(self.z)})"
        return self.family

    @property
    def builtin(self) -> bool:
        return self.family in BUILTIN_FAMILIES

    def ratio_scale(self) -> Expr:
        return X2 if self.family == "QuotientZ" else ONE

    def denominator(self, F: VectorField) -> Expr:
        """The family's D; for QuotientZ this is f1 - (x1/x2) f2."""
        f1, f2 = F.f1, F.f2
        if self.family == "SingleVar":
            return f1 if self.args[0] == 1 else f2
        if self.family == "ProductZ":
            return normalize(X2 * f1 + X1 * f2)
        if self.family == "SumZ":
            return normalize(f1 + f2)
        if self.family == "LinearZ":
            c1, c2 = self.args
            return normalize(const(c1) * f1 + const(c2) * f2)
        if self.family == "QuotientZ":
            return normalize(f1 - X1 / X2 * f2)
        if self.family == "GeneralProduct":
            g1, g2 = self.args
            return normalize(f1 * g2 * differentiate(g1, "x1") + f2 * g1 * differentiate(g2, "x2"))
        return generic_denominator(F, self.z)

    def reduced_denominator(self, F: VectorField) -> Expr:
        """D divided by the ratio scale, i.e. f1 z_x1 + f2 z_x2."""
        return normalize(self.denominator(F) / self.ratio_scale())


def generic_denominator(F: VectorField, z: Expr) -> Expr:
    return normalize(F.f1 * differentiate(z, "x1") + F.f2 * differentiate(z, "x2"))


def single_var(i: int) -> Ansatz:
    if i not in (1, 2):
        raise ValueError("SingleVar index must be 1 or 2")
    return Ansatz("SingleVar", X1 if i == 1 else X2, (i,))


def product_z() -> Ansatz:
    return Ansatz("ProductZ", normalize(X1 * X2))


def sum_z() -> Ansatz:
    return Ansatz("SumZ", normalize(X1 + X2))


def linear_z(c1, c2) -> Ansatz:
    c1, c2 = Fraction(c1), Fraction(c2)
    if c1 == 0 and c2 == 0:
        raise ValueError("LinearZ needs (c1, c2) != (0, 0)")
    c1 = int(c1) if c1.denominator == 1 else c1
    c2 = int(c2) if c2.denominator == 1 else c2
    return Ansatz("LinearZ", normalize(const(c1) * X1 + const(c2) * X2), (c1, c2))


def quotient_z() -> Ansatz:
    return Ansatz("QuotientZ", normalize(X1 / X2))


def general_product(g1, g2) -> Ansatz:
    g1, g2 = normalize(as_expr(g1)), normalize(as_expr(g2))
    if "x2" in g1.symbols() or "x1" in g2.symbols():
        raise ValueError("GeneralProduct needs g1(x1) and g2(x2)")
    return Ansatz("GeneralProduct", normalize(g1 * g2), (g1, g2))


def general_sum(k1, k2) -> Ansatz:
    k1, k2 = normalize(as_expr(k1)), normalize(as_expr(k2))
    if "x2" in k1.symbols() or "x1" in k2.symbols():
        raise ValueError("GeneralSum needs k1(x1) and k2(x2)")
    return Ansatz("GeneralSum", normalize(k1 + k2), (k1, k2))


def general_z(z) -> Ansatz:
    z = normalize(as_expr(z))
    if not ({"x1", "x2"} & z.symbols()):
        raise ValueError("GeneralZ needs z to depend on x1 or x2")
    return Ansatz("GeneralZ", z, (z,))


def builtin_ansatze(config: Config | None = None, region: Region | None = None) -> list[Ansatz]:
    cfg = config or Config()
    out = [single_var(1), single_var(2), product_z(), sum_z()]
    out += [linear_z(c1, c2) for c1, c2 in cfg.linear_grid]
    out.append(quotient_z())
    if cfg.families:
        wanted = set(cfg.families)
        out = [a for a in out if a.family in wanted or a.label in wanted]
    return out


# -- gamma templates ------------------------------------------------------------


@dataclass(frozen=True)
class GammaTemplate:
    """gamma(z) = inv/z + p0 + p1 z + p2 z^2."""

    form: str
    inv: Fraction = Fraction(0)
    poly: tuple[Fraction, Fraction, Fraction] = (Fraction(0), Fraction(0), Fraction(0))

    def expr(self) -> Expr:
        terms = [const(self.inv) / Z] if self.inv else []
        for j, p in enumerate(self.poly):
            if p:
                terms.append(const(p) * Z**j if j else const(p))
        return normalize(Sum(tuple(terms))) if terms else ZERO

    @property
    def label(self) -> str:
        return to_text(self.expr())


def templates(config: Config | None = None) -> list[list[GammaTemplate]]:
    """Template instances grouped in the order the search tries them."""
    cfg = config or Config()
    grid = list(cfg.kappa_grid)
    zero = Fraction(0)
    batches: list[list[GammaTemplate]] = []
    for form in cfg.template_forms:
        if form == "inv":
            batches.append([GammaTemplate("inv", k) for k in grid if k < 0])
            batches.append([GammaTemplate("inv", k) for k in grid if k > 0])
        elif form == "const":
            batches.append([GammaTemplate("const", poly=(k, zero, zero)) for k in grid])
        elif form == "mixed":
            batches.append(
                [GammaTemplate("mixed", k2, (k1, zero, zero)) for k1 in grid for k2 in grid]
            )
        elif form == "poly":
            batches.append(
                [GammaTemplate("poly", poly=(zero, k, zero)) for k in grid]
                + [GammaTemplate("poly", poly=(zero, zero, k)) for k in grid]
            )
        else:
            raise ValueError(f"unknown template form '{form}'")
    return [b for b in batches if b]


# -- the constructive steps -----------------------------------------------------


def _ranges(region: Region | None, env: ParameterEnv | None) -> dict | None:
    return sampling_ranges(region, env) if (region is not None or env is not None) else None


def dependence_ratio(F: VectorField, c, a: Ansatz) -> Expr:
    """(c - div F) / D, times x2 for QuotientZ."""
    D = a.denominator(F)
    if D == ZERO:
        raise DegenerateDenominator(f"denominator of {a.label} is identically zero")
    return normalize(a.ratio_scale() * (as_expr(c) - divergence(F)) / D)


def depends_only_on_z(e: Expr, z: Expr, ranges: dict | None = None, seed: int = 0) -> bool:
    """Jacobian test: de/dx1 dz/dx2 - de/dx2 dz/dx1 == 0."""
    e, z = normalize(as_expr(e)), normalize(as_expr(z))
    jac = differentiate(e, "x1") * differentiate(z, "x2") - differentiate(e, "x2") * differentiate(z, "x1")
    try:
        return zero_test(normalize(jac), ranges, seed=seed).is_zero
    except ZeroTestError:
        return False


def _solve_affine(z: Expr, var: str):
    """Solve z = Z for ``var`` when z is a Moebius function of it; None otherwise."""
    rf = rational_form(z)
    gens = [g for g in rf.gens]
    idx = next((i for i, g in enumerate(gens) if isinstance(g, Variable) and g.name == var), None)
    if idx is None:
        return None
    if any(m[idx] > 1 for m, _ in rf.num + rf.den):
        return None
    for g in gens:
        if isinstance(g, (Exp, Log)) and var in g.symbols():
            return None

    def split(terms):
        from .expr.rational import _poly_expr

        a = tuple((m, c) for m, c in terms if m[idx] == 1)
        b = tuple((m, c) for m, c in terms if m[idx] == 0)
        strip = lambda ts: tuple((m[:idx] + (0,) + m[idx + 1 :], c) for m, c in ts)
        return _poly_expr(rf.gens, strip(a)), _poly_expr(rf.gens, strip(b))

    A, B = split(rf.num)
    C, E = split(rf.den)
    # z = (A v + B) / (C v + E)  =>  v = (B - E Z) / (C Z - A)
    den = normalize(C * Z - A)
    if den == ZERO:
        return None
    return normalize((B - E * Z) / den)


def _sections(a: Ansatz):
    """Candidate section curves as substitution maps x1, x2 -> expressions in z."""
    if a.family in ("SumZ", "LinearZ"):
        ts = (Fraction(0),) + SECTION_FALLBACK
    else:
        ts = SECTION_FALLBACK
    if a.family == "SingleVar":
        i = a.args[0]
        for t in ts:
            yield ({"x1": Z, "x2": const(t)} if i == 1 else {"x1": const(t), "x2": Z})
        return
    for var, other in (("x1", "x2"), ("x2", "x1")):
        for t in ts:
            zt = substitute(a.z, {other: const(t)})
            try:
                sol = _solve_affine(zt, var)
            except ZeroDivisionError:
                sol = None
            if sol is not None:
                yield {var: sol, other: const(t)}


def express_in_z(e: Expr, a: Ansatz, ranges: dict | None = None, seed: int = 0) -> Expr:
    """Rewrite ``e`` (already known to depend on z only) as an expression in z."""
    e = normalize(as_expr(e))
    if not ({"x1", "x2"} & e.symbols()):
        return e
    tried = False
    for sub in _sections(a):
        tried = True
        try:
            g = substitute(e, sub)
        except ZeroDivisionError:
            continue
        if {"x1", "x2"} & g.symbols():
            continue
        try:
            back = substitute(g, {"z": a.z})
            ok = zero_test(normalize(e - back), ranges, seed=seed).is_zero
        except (ZeroDivisionError, ZeroTestError):
            continue
        if ok:
            return g
        raise VerificationFailed(f"{to_text(e)} is not a function of z = {to_text(a.z)}")
    if not tried:
        raise SectionOutsideDomain(f"no section curve available for z = {to_text(a.z)}")
    raise SectionOutsideDomain(f"every section curve for z = {to_text(a.z)} meets a pole of {to_text(e)}")


def synthesize_c(F: VectorField, a: Ansatz, gamma) -> Expr:
    """c = div F + gamma(z) D, with D reduced by the ratio scale."""
    g = normalize(as_expr(gamma))
    gz = substitute(g, {"z": a.z}) if "z" in g.symbols() else g
    return normalize(divergence(F) + gz * a.reduced_denominator(F))


def gamma_coefficients(gamma) -> tuple[Fraction, tuple[Expr, Expr, Expr]]:
    """Split gamma into (kappa, (p0, p1, p2)) with gamma = kappa/z + p0 + p1 z + p2 z^2."""
    g = normalize(as_expr(gamma))
    rf = rational_form(normalize(g * Z))
    if not rf.is_polynomial:
        raise UnsupportedGamma(f"gamma = {to_text(g)} is not of the form kappa/z + polynomial")
    from .expr.rational import _poly_expr

    zi = next((i for i, v in enumerate(rf.gens) if isinstance(v, Variable) and v.name == "z"), None)
    for v in rf.gens:
        if not isinstance(v, (Variable, Parameter)) or isinstance(v, Variable) and v.name != "z":
            raise UnsupportedGamma(f"gamma = {to_text(g)} depends on more than z")
    d = rf.den[0][1]
    by_deg: dict[int, list] = {}
    for m, c in rf.num:
        k = m[zi] if zi is not None else 0
        rest = m[:zi] + (0,) + m[zi + 1 :] if zi is not None else m
        by_deg.setdefault(k, []).append((rest, c / d))
    if any(k > 3 for k in by_deg):
        raise UnsupportedGamma(f"gamma = {to_text(g)} has degree above 2 in z")
    coeff = {k: normalize(_poly_expr(rf.gens, tuple(ts))) for k, ts in by_deg.items()}
    kappa = coeff.get(0, ZERO)
    if not isinstance(kappa, RationalConstant) and kappa != ZERO:
        raise UnsupportedGamma(f"coefficient of 1/z must be a number, got {to_text(kappa)}")
    kv = kappa.value if isinstance(kappa, RationalConstant) else Fraction(0)
    return kv, (coeff.get(1, ZERO), coeff.get(2, ZERO), coeff.get(3, ZERO))


def _z_sign(z: Expr, region: Region | None, env: ParameterEnv | None, config: Config) -> int:
    """+1 if z > 0 on the region is proved, -1 if z < 0 is proved, 0 otherwise."""
    if region is None:
        return 0
    if prove_sign(z, region, env, "positive", config).proved:
        return 1
    if prove_sign(z, region, env, "negative", config).proved:
        return -1
    return 0


def build_h(
    gamma,
    a: Ansatz,
    region: Region | None = None,
    env: ParameterEnv | None = None,
    config: Config | None = None,
) -> Expr:
    """h = z^kappa exp(sum p_j z^(j+1)/(j+1)) with z replaced by the family's z.

    When z is proved negative on the region the base -z is used instead, so
    that h stays positive for odd kappa.  A non-integer kappa needs z proved
    positive on the region.
    """
    cfg = config or Config()
    kappa, poly = gamma_coefficients(gamma)
    z = a.z
    base = z
    if kappa:
        sign = _z_sign(z, region, env, cfg) if (kappa.denominator != 1 or region is not None) else 0
        if kappa.denominator != 1:
            if sign <= 0:
                raise UnsupportedGamma(f"non-integer kappa {kappa} needs z = {to_text(z)} > 0 on the region")
        elif sign < 0:
            base = normalize(-z)
    parts = []
    if kappa:
        if kappa.denominator == 1:
            parts.append(Power(base, int(kappa)))
        else:
            parts.append(Exp(const(kappa) * Log(base)))
    integral = normalize(Sum(tuple(p * Z ** (j + 1) / const(j + 1) for j, p in enumerate(poly))))
    if integral != ZERO:
        parts.append(Exp(substitute(integral, {"z": z})))
    h = ONE
    for p in parts:
        h = h * p
    return normalize(h)


# -- separable fast path ----------------------------------------------------------


def _is_product_separable(e: Expr, ranges=None, seed: int = 0) -> bool:
    """e = r(x1) s(x2) iff e e_x1x2 - e_x1 e_x2 == 0 (for e not identically zero)."""
    if e == ZERO:
        return False
    ex1 = differentiate(e, "x1")
    ex2 = differentiate(e, "x2")
    test = normalize(e * differentiate(ex1, "x2") - ex1 * ex2)
    try:
        return zero_test(test, ranges, seed=seed).is_zero
    except ZeroTestError:
        return False


_BASE_POINTS = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3))


def _factor_out(e: Expr, keep: str, other: str) -> Expr | None:
    """r(keep) with e = r(keep) s(other), scaled so that r(base point) = 1."""
    for t0 in _BASE_POINTS:
        try:
            r = substitute(e, {other: const(t0)})
        except ZeroDivisionError:
            continue
        if r == ZERO:
            continue
        for k0 in _BASE_POINTS:
            try:
                scale = substitute(r, {keep: const(k0)})
            except ZeroDivisionError:
                continue
            if scale == ZERO:
                continue
            out = normalize(r / scale)
            if other not in out.symbols():
                return out
    return None


def _center_sign(e: Expr, region: Region | None, env: ParameterEnv) -> int:
    point = {k: float(v) for k, v in env.midpoint().items()}
    if region is not None:
        point.update({k: float(v) for k, v in region.center().items()})
    else:
        point.update({"x1": 1.0, "x2": 1.0})
    try:
        v = compile_float(e)(point)
    except (ZeroDivisionError, ValueError, OverflowError):
        return 0
    return 1 if v > 0 else -1 if v < 0 else 0


def separable_candidates(F: VectorField, region: Region | None = None) -> list[DulacCandidate]:
    """Candidates from the separable shapes x1' = r1(x1) s1(x2) or x2' = r2(x1) s2(x2).

    With f1 = r1 s1 the choice h = 1/r1 gives div(hF) = (df2/dx2)/r1, so
    c = df2/dx2; symmetrically h = 1/s2 and c = df1/dx1 when f2 = r2 s2.
    """
    Fs = F.specialized()
    ranges = _ranges(region, F.env)
    out = []
    routes = (
        (Fs.f1, "x1", "x2", "x2", 1),
        (Fs.f2, "x2", "x1", "x1", 2),
    )
    for f, keep, other, cvar, idx in routes:
        if not ({"x1", "x2"} & f.symbols()):
            continue
        if not _is_product_separable(f, ranges):
            continue
        r = _factor_out(f, keep, other)
        if r is None or r == ZERO:
            continue
        sign = _center_sign(r, region, F.env)
        if sign == 0:
            continue
        h = normalize(const(sign) / r)
        other_f = Fs.f2 if idx == 1 else Fs.f1
        c = differentiate(other_f, cvar)
        gamma = normalize(-differentiate(r, keep) / r)
        gz = substitute(gamma, {keep: Z})
        out.append(DulacCandidate(h, c, f"SingleVar({idx})", gz, "fast-path"))
    return out


def detect_separable(F: VectorField, region: Region | None = None) -> DulacCandidate | None:
    cands = separable_candidates(F, region)
    return cands[0] if cands else None


# -- search --------------------------------------------------------------------------


@dataclass(frozen=True)
class TranscriptEntry:
    rank: int
    family: str
    template: str
    outcome: str  # "certified" or "rejected"
    stage: str = ""
    status: str = ""
    reason: str = ""
    h: str = ""

    def line(self) -> str:
        parts = [f"#{self.rank}", self.family, f"gamma = {self.template}", self.outcome]
        if self.stage:
            parts.append(f"at {self.stage}")
        if self.status:
            parts.append(self.status)
        if self.reason:
            parts.append(self.reason)
        return " | ".join(parts)


@dataclass(frozen=True)
class SearchResult:
    certificate: Certificate | None
    transcript: tuple[TranscriptEntry, ...] = ()
    certificates: tuple[Certificate, ...] = field(default=(), compare=False)

    @property
    def found(self) -> bool:
        return self.certificate is not None

    @property
    def all_disproved(self) -> bool:
        """Every rejected candidate was refuted by a counterexample (none left Unknown)."""
        rej = [t for t in self.transcript if t.outcome == "rejected" and t.stage != "guard"]
        return bool(rej) and all(t.status == "Disproved" for t in rej)


@dataclass(frozen=True)
class _Job:
    rank: int
    kind: str  # "fast", "template", "user"
    ansatz: Ansatz | None = None
    template: GammaTemplate | None = None
    candidate: DulacCandidate | None = None
    c: Expr | None = None


def _status_of(exc: Exception) -> str:
    proof = getattr(exc, "proof", None)
    return proof.status if isinstance(proof, SignProof) else "Refused"


def _refusal_entry(job, family, template, exc, stage) -> TranscriptEntry:
    proof = getattr(exc, "proof", None)
    reason = str(exc)
    if isinstance(proof, SignProof) and proof.counterexample is not None:
        pt = ", ".join(f"{k}={v}" for k, v in proof.counterexample.point)
        reason += f" at ({pt})"
    return TranscriptEntry(job.rank, family, template, "rejected", stage, _status_of(exc), reason)


def _run_job(F: VectorField, region: Region, cfg: Config, job: _Job):
    """Evaluate one search candidate; returns (TranscriptEntry, Certificate or None)."""
    env = F.env
    Fs = F.specialized()
    if job.kind == "fast":
        cand = job.candidate
        label, tmpl = cand.ansatz, "fast path " + to_text(cand.gamma)
        return _certify_entry(F, region, cfg, job, cand, label, tmpl, None)

    a = job.ansatz
    if job.kind == "template":
        t = job.template
        label, tmpl = a.label, t.label
        gamma = t.expr()
        c = synthesize_c(Fs, a, gamma)
        if c == ZERO:
            return TranscriptEntry(job.rank, label, tmpl, "rejected", "c-sign", "Disproved", "c is identically zero"), None
        c_proof = prove_fixed_sign(c, region, env, cfg)
        if not c_proof.proved:
            exc = CertificationRefused(f"fixed sign of c = {to_text(c)} not proved", c_proof)
            return _refusal_entry(job, label, tmpl, exc, "c-sign"), None
    else:
        label, tmpl = a.label, "from c"
        c = normalize(env.fix(job.c))
        c_proof = None
        try:
            ratio = dependence_ratio(Fs, c, a)
        except DegenerateDenominator as exc:
            return TranscriptEntry(job.rank, label, tmpl, "rejected", "dependence", "Refused", str(exc)), None
        if not depends_only_on_z(ratio, a.z, sampling_ranges(region, env), cfg.seed):
            msg = f"ratio {to_text(ratio)} does not depend on z = {to_text(a.z)} alone"
            return TranscriptEntry(job.rank, label, tmpl, "rejected", "dependence", "Refused", msg), None
        try:
            gamma = express_in_z(ratio, a, sampling_ranges(region, env), cfg.seed)
        except (SectionOutsideDomain, VerificationFailed) as exc:
            return TranscriptEntry(job.rank, label, tmpl, "rejected", "express-in-z", "Refused", str(exc)), None
        tmpl = "from c: " + to_text(gamma)

    try:
        h = build_h(gamma, a, region, env, cfg)
    except UnsupportedGamma as exc:
        return TranscriptEntry(job.rank, label, tmpl, "rejected", "build-h", "Refused", str(exc)), None
    cand = DulacCandidate(h, c, label, normalize(gamma), "user" if job.kind == "user" else "search")
    return _certify_entry(F, region, cfg, job, cand, label, tmpl, c_proof)


def _certify_entry(F, region, cfg, job, cand, label, tmpl, c_proof):
    try:
        cert = certify_dulac(F, cand, region, cfg, c_proof=c_proof)
    except CertificationRefused as exc:
        entry = _refusal_entry(job, label, tmpl, exc, "certify")
        return TranscriptEntry(**{**entry.__dict__, "h": to_text(cand.h)}), None
    return TranscriptEntry(job.rank, label, tmpl, "certified", "", "Proved", "", to_text(cand.h)), cert


def _jobs(F: VectorField, region: Region, cfg: Config, c: Expr | None, ansatze) -> list[_Job]:
    jobs: list[_Job] = []
    if c is not None:
        fams = list(ansatze) if ansatze is not None else builtin_ansatze(cfg, region)
        for a in fams:
            jobs.append(_Job(len(jobs), "user", a, c=as_expr(c)))
        return jobs
    if not cfg.families or any(f.startswith("SingleVar") or f == "fast-path" for f in cfg.families):
        for cand in separable_candidates(F, region):
            jobs.append(_Job(len(jobs), "fast", candidate=cand))
    fams = list(ansatze) if ansatze is not None else builtin_ansatze(cfg, region)
    for batch in templates(cfg):
        for a in fams:
            for t in batch:
                jobs.append(_Job(len(jobs), "template", a, t))
    return jobs


def _skip_reason(a: Ansatz | None, region: Region) -> str:
    if a is not None and a.family == "QuotientZ" and region.x2[0] <= 0:
        return "QuotientZ needs the region to keep x2 > 0"
    return ""


def search(
    F: VectorField,
    region: Region,
    config: Config | None = None,
    *,
    c=None,
    ansatze=None,
) -> SearchResult:
    """First fully certified Dulac candidate in the fixed candidate order.

    Candidates are: the separable fast path, then every built-in family
    crossed with the gamma templates (batched by template form, so that
    e.g. all ``kappa/z`` candidates with kappa < 0 come before any positive
    kappa).  With ``c`` given, the ratio for each family is tested for
    dependence on z instead.  Parallel workers evaluate candidates in rank
    order; the lowest certified rank wins, so the result does not depend on
    scheduling.
    """
    cfg = config or Config()
    if c is not None:
        c = normalize(as_expr(c))
    jobs = _jobs(F, region, cfg, c, ansatze)
    budget = cfg.max_candidates
    transcript: list[TranscriptEntry] = []
    certs: list[Certificate] = []
    winner: Certificate | None = None

    def handle(job, res):
        nonlocal winner
        entry, cert = res
        transcript.append(entry)
        if cert is not None:
            certs.append(cert)
            if winner is None:
                winner = cert

    pending = []
    for job in jobs:
        reason = _skip_reason(job.ansatz, region)
        if reason:
            transcript.append(TranscriptEntry(job.rank, job.ansatz.label, job.template.label if job.template else "", "rejected", "guard", "Refused", reason))
            continue
        pending.append(job)
    if budget is not None and len(pending) > budget:
        pending_run, exhausted = pending[:budget], True
    else:
        pending_run, exhausted = pending, False

    if cfg.workers > 1 and len(pending_run) > 1:
        chunk = cfg.workers * 2
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for i in range(0, len(pending_run), chunk):
                part = pending_run[i : i + chunk]
                results = list(pool.map(_run_job, itertools.repeat(F), itertools.repeat(region), itertools.repeat(cfg), part))
                for job, res in zip(part, results):
                    handle(job, res)
                if winner is not None and not cfg.exhaustive:
                    break
    else:
        for job in pending_run:
            handle(job, _run_job(F, region, cfg, job))
            if winner is not None and not cfg.exhaustive:
                break

    transcript.sort(key=lambda t: t.rank)
    if winner is not None and not cfg.exhaustive:
        win_rank = next(t.rank for t in transcript if t.outcome == "certified")
        transcript = [t for t in transcript if t.rank <= win_rank]
    if winner is None and exhausted:
        raise BudgetExhausted(f"no certificate within {budget} candidates", transcript)
    return SearchResult(winner, tuple(transcript), tuple(certs))


__all__ = [
    "Ansatz",
    "BudgetExhausted",
    "DegenerateDenominator",
    "GammaTemplate",
    "SearchResult",
    "SectionOutsideDomain",
    "TranscriptEntry",
    "UnsupportedGamma",
    "VerificationFailed",
    "build_h",
    "builtin_ansatze",
    "dependence_ratio",
    "depends_only_on_z",
    "detect_separable",
    "express_in_z",
    "gamma_coefficients",
    "general_product",
    "general_sum",
    "general_z",
    "generic_denominator",
    "linear_z",
    "product_z",
    "quotient_z",
    "search",
    "separable_candidates",
    "single_var",
    "sum_z",
    "synthesize_c",
    "templates",
]
