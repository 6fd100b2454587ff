"""Interval branch-and-bound sign prover and Dulac certificates.

A sign claim is one of ``positive``, ``negative`` (strict everywhere on the
region) or ``nonneg-ae``, ``nonpos-ae`` (fixed sign, vanishing only on a
null set).  Parameters with a proper range are treated as extra box axes,
so a proof covers every parameter value in the declared ranges.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .config import Config
from .expr import (
    EvaluationDomainError,
    Expr,
    IntervalBox,
    IntervalDomainError,
    ZeroTestError,
    compile_float,
    compile_interval,
    differentiate,
    eval_point,
    normalize,
    numerator_denominator,
    zero_test,
)
from .expr.evaluate import interval_enclosure
from .system import (
    DulacCandidate,
    ParameterEnv,
    Region,
    VectorField,
    div_hF,
    divergence,
    pde_residual,
    sampling_ranges,
)

__all__ = [
    "CLAIMS",
    "Certificate",
    "CertificationRefused",
    "Counterexample",
    "IntervalBox",
    "PoleInRegion",
    "RefusedResidualNonzero",
    "RefusedSignUnproved",
    "SignProof",
    "certify_dulac",
    "prove_sign",
    "prove_fixed_sign",
]

CLAIMS = ("positive", "negative", "nonneg-ae", "nonpos-ae")
PROVED, DISPROVED, UNKNOWN = "Proved", "Disproved", "Unknown"

_FLIP = {
    "positive": "negative",
    "negative": "positive",
    "nonneg-ae": "nonpos-ae",
    "nonpos-ae": "nonneg-ae",
}


def _violates_value(claim: str, v) -> bool:
    if claim == "positive":
        return v <= 0
    if claim == "negative":
        return v >= 0
    if claim == "nonneg-ae":
        return v < 0
    return v > 0


def _box_satisfies(claim: str, lo: float, hi: float) -> bool:
    if claim == "positive":
        return lo > 0.0
    if claim == "negative":
        return hi < 0.0
    if claim == "nonneg-ae":
        return lo >= 0.0
    return hi <= 0.0


def _box_violates(claim: str, lo: float, hi: float) -> bool:
    if claim == "positive":
        return hi <= 0.0
    if claim == "negative":
        return lo >= 0.0
    if claim == "nonneg-ae":
        return hi < 0.0
    return lo > 0.0


@dataclass(frozen=True)
class Counterexample:
    point: tuple[tuple[str, Fraction], ...]
    value: Fraction | float
    exact: bool

    def as_dict(self) -> dict:
        return dict(self.point)


@dataclass(frozen=True)
class SignProof:
    claim: str
    status: str
    counterexample: Counterexample | None = None
    undecided: tuple[IntervalBox, ...] = ()
    undecided_fraction: float = 0.0
    boxes_total: int = 0
    max_depth: int = 0
    reason: str = ""
    witness: tuple[tuple[str, Fraction], ...] | None = None
    zero_mode: str = "exact"
    pole: bool = False
    wall_time: float = field(default=0.0, compare=False)

    @property
    def proved(self) -> bool:
        return self.status == PROVED

    @property
    def disproved(self) -> bool:
        return self.status == DISPROVED


@dataclass
class _Outcome:
    status: str
    point: dict | None = None
    undecided: list = field(default_factory=list)
    boxes: int = 0
    depth: int = 0
    fraction: Fraction = Fraction(0)
    witness: dict | None = None


def _float_point(point: dict) -> dict:
    return {k: float(v) for k, v in point.items()}


def _sample_points(box: IntervalBox, cfg: Config) -> list[dict]:
    axes = list(box.axes())
    center = box.center()
    pts = [center]
    # regular grid over the state variables, parameters at their midpoints
    n = 6
    for i in range(n):
        for j in range(n):
            p = dict(center)
            p["x1"] = box.x1[0] + (box.x1[1] - box.x1[0]) * Fraction(i, n - 1)
            p["x2"] = box.x2[0] + (box.x2[1] - box.x2[0]) * Fraction(j, n - 1)
            pts.append(p)
    rng = random.Random(cfg.seed)
    for _ in range(cfg.samples):
        p = {}
        for name, (lo, hi) in axes:
            p[name] = lo if lo == hi else lo + (hi - lo) * Fraction(rng.randrange(1 << 16), (1 << 16) - 1)
        pts.append(p)
    # every corner of the joint box (a random subset when there are many axes)
    split_all = [(n, b) for n, b in axes if b[1] > b[0]]
    if len(split_all) <= 10:
        corners = itertools.product(*[(lo, hi) for _, (lo, hi) in split_all])
    else:
        corners = (tuple(rng.choice(b) for _, b in split_all) for _ in range(1024))
    for combo in corners:
        p = dict(center)
        p.update({n: v for (n, _), v in zip(split_all, combo)})
        pts.append(p)
    # random state points with parameters pushed to their box corners
    split = [n for n, (lo, hi) in box.params if hi > lo]
    for _ in range(cfg.samples if split else 0):
        p = dict(center)
        for name, (lo, hi) in box.params:
            p[name] = rng.choice((lo, hi))
        for name, (lo, hi) in (("x1", box.x1), ("x2", box.x2)):
            p[name] = lo + (hi - lo) * Fraction(rng.randrange(1 << 16), (1 << 16) - 1)
        pts.append(p)
    return pts


def _exact_violation(P: Expr, claim: str, point: dict):
    try:
        v = eval_point(P, point)
    except EvaluationDomainError:
        return None
    return v if _violates_value(claim, v) else None


def _search_counterexample(P: Expr, box: IntervalBox, claim: str, cfg: Config):
    """Returns (violating point or None, witness point with nonzero value or None)."""
    f = compile_float(P)
    witness = None
    for p in _sample_points(box, cfg):
        try:
            v = f(_float_point(p))
        except (ZeroDivisionError, ValueError, OverflowError):
            continue
        if math.isnan(v):
            continue
        if witness is None and v != 0.0:
            witness = p
        # confirm near-boundary float signs exactly
        if _violates_value(claim, v) or abs(v) < 1e-9:
            if _exact_violation(P, claim, p) is not None:
                return p, witness
    return None, witness


def _bnb(P: Expr, root: IntervalBox, claim: str, cfg: Config, allow_thin: bool) -> _Outcome:
    f = compile_interval(P)
    fp = compile_float(P)
    queue = deque([root])
    undecided: list[IntervalBox] = []
    boxes, depth = 0, 0
    while queue:
        b = queue.popleft()
        boxes += 1
        depth = max(depth, b.depth)
        if boxes > cfg.max_boxes:
            undecided.append(b)
            undecided.extend(queue)
            break
        vals = b.intervals()
        iv = None
        try:
            iv = f(vals)
            if not (_box_satisfies(claim, iv.lo, iv.hi) or _box_violates(claim, iv.lo, iv.hi)):
                iv = interval_enclosure(P, vals, monotonic=True)
        except IntervalDomainError:
            iv = None
        if iv is not None:
            if _box_satisfies(claim, iv.lo, iv.hi):
                continue
            if _box_violates(claim, iv.lo, iv.hi):
                p = b.center()
                if _exact_violation(P, claim, p) is not None:
                    return _Outcome(DISPROVED, point=p, boxes=boxes, depth=depth)
        # cheap probe: a violating centre settles the claim at once
        p = b.center()
        try:
            v = fp(_float_point(p))
        except (ZeroDivisionError, ValueError, OverflowError):
            v = math.nan
        if not math.isnan(v) and (_violates_value(claim, v) or abs(v) < 1e-12):
            if _exact_violation(P, claim, p) is not None:
                return _Outcome(DISPROVED, point=p, boxes=boxes, depth=depth)
        if b.depth >= cfg.max_depth:
            undecided.append(b)
            continue
        queue.extend(b.bisect())

    if not undecided:
        return _Outcome(PROVED, boxes=boxes, depth=depth)
    for b in undecided:
        p = b.center()
        if _exact_violation(P, claim, p) is not None:
            return _Outcome(DISPROVED, point=p, boxes=boxes, depth=depth)
    root_vol = root.volume()
    frac = sum((b.volume() for b in undecided), Fraction(0)) / root_vol if root_vol else Fraction(0)
    thin = all(
        w <= Fraction(cfg.delta_zero) for b in undecided for n, w in b.widths().items() if n in root.split_axes()
    )
    status = PROVED if (allow_thin and thin and frac <= Fraction(cfg.rho)) else UNKNOWN
    undecided.sort(key=lambda b: tuple(x for _, bd in b.axes() for x in bd))
    return _Outcome(status, undecided=undecided, boxes=boxes, depth=depth, fraction=frac)


def _prove_plain(P: Expr, box: IntervalBox, claim: str, cfg: Config) -> _Outcome:
    point, witness = _search_counterexample(P, box, claim, cfg)
    if point is not None:
        return _Outcome(DISPROVED, point=point, witness=witness)
    out = _bnb(P, box, claim, cfg, allow_thin=claim.endswith("-ae"))
    out.witness = witness
    return out


def _freeze(point: dict | None):
    if point is None:
        return None
    return tuple(sorted(point.items(), key=lambda kv: (kv[0] not in ("x1", "x2"), kv[0])))


def prove_sign(
    e: Expr,
    region: Region,
    env: ParameterEnv | None,
    claim: str,
    config: Config | None = None,
) -> SignProof:
    """Prove or refute a sign claim for ``e`` on ``region`` for all parameters in ``env``."""
    if claim not in CLAIMS:
        raise ValueError(f"unknown claim '{claim}'")
    cfg = config or Config()
    env = env or ParameterEnv()
    t0 = time.perf_counter()
    e = normalize(env.fix(e))
    box = region.box(env)
    ranges = sampling_ranges(region, env)

    try:
        zt = zero_test(e, ranges, samples=cfg.zero_samples, seed=cfg.seed)
    except ZeroTestError as exc:
        return SignProof(claim, UNKNOWN, reason=str(exc), wall_time=time.perf_counter() - t0)
    if zt.is_zero:
        p = box.center()
        ce = Counterexample(_freeze(p), Fraction(0), True)
        return SignProof(
            claim,
            DISPROVED,
            counterexample=ce,
            reason="identically zero",
            zero_mode=zt.mode,
            wall_time=time.perf_counter() - t0,
        )

    # a sampled violation of e itself is valid even when e has poles elsewhere
    point, witness = _search_counterexample(e, box, claim, cfg)
    if point is not None:
        value = eval_point(e, point)
        exact = isinstance(value, Fraction)
        return SignProof(
            claim,
            DISPROVED,
            counterexample=Counterexample(_freeze(point), value if exact else float(value), exact),
            witness=_freeze(witness),
            zero_mode=zt.mode,
            wall_time=time.perf_counter() - t0,
        )

    num, den = numerator_denominator(e)
    den_sign = 1
    boxes = depth = 0
    if den.symbols():
        d_pos = _prove_plain(den, box, "positive", cfg)
        boxes += d_pos.boxes
        if d_pos.status != PROVED:
            d_neg = _prove_plain(den, box, "negative", cfg)
            boxes += d_neg.boxes
            if d_neg.status != PROVED:
                pole = d_pos.status == DISPROVED and d_neg.status == DISPROVED
                reason = "denominator vanishes in region" if pole else "denominator not proved nonvanishing"
                return SignProof(
                    claim,
                    UNKNOWN,
                    boxes_total=boxes,
                    reason=reason,
                    zero_mode=zt.mode,
                    pole=pole,
                    wall_time=time.perf_counter() - t0,
                )
            den_sign = -1

    target = claim if den_sign > 0 else _FLIP[claim]
    out = _bnb(num, box, target, cfg, allow_thin=target.endswith("-ae"))
    out.witness = witness
    boxes += out.boxes
    depth = max(depth, out.depth)
    elapsed = time.perf_counter() - t0
    if out.status == DISPROVED:
        try:
            value = eval_point(e, out.point)
        except EvaluationDomainError:
            value = eval_point(num, out.point)
        exact = isinstance(value, Fraction)
        ce = Counterexample(_freeze(out.point), value if exact else float(value), exact)
        return SignProof(
            claim,
            DISPROVED,
            counterexample=ce,
            boxes_total=boxes,
            max_depth=depth,
            witness=_freeze(out.witness),
            zero_mode=zt.mode,
            wall_time=elapsed,
        )
    return SignProof(
        claim,
        out.status,
        undecided=tuple(out.undecided),
        undecided_fraction=float(out.fraction),
        boxes_total=boxes,
        max_depth=depth,
        reason="" if out.status == PROVED else "undecided boxes remain",
        witness=_freeze(out.witness),
        zero_mode=zt.mode,
        wall_time=elapsed,
    )


def _guess_sign(e: Expr, region: Region, env: ParameterEnv) -> int:
    f = compile_float(e)
    box = region.box(env)
    for p in _sample_points(box, Config(samples=16)):
        try:
            v = f(_float_point(p))
        except (ZeroDivisionError, ValueError, OverflowError):
            continue
        if v > 0:
            return 1
        if v < 0:
            return -1
    return 1


def prove_fixed_sign(e: Expr, region: Region, env: ParameterEnv, config: Config, sign: int | None = None) -> SignProof:
    """Try the strict claim, then the almost-everywhere claim, for the sign of ``e``.

    The sign is guessed from samples when not given.  Returns the first
    Proved result, otherwise the most informative failure.
    """
    if sign is None:
        sign = _guess_sign(normalize(env.fix(e)), region, env)
    claims = ("positive", "nonneg-ae") if sign > 0 else ("negative", "nonpos-ae")
    last = None
    for claim in claims:
        proof = prove_sign(e, region, env, claim, config)
        if proof.proved:
            return proof
        if last is None or (proof.disproved and not last.disproved) or not last.disproved:
            last = proof
        if proof.pole or proof.reason == "identically zero":
            break
    return last


def denominator_vanishes(e: Expr, region: Region, env: ParameterEnv, config: Config) -> bool:
    """True when the denominator of ``e`` provably takes both signs or hits zero in the region."""
    _, den = numerator_denominator(normalize(env.fix(e)))
    if not den.symbols():
        return False
    box = region.box(env)
    for claim in ("positive", "negative"):
        if _prove_plain(den, box, claim, config).status != DISPROVED:
            return False
    return True


def claim_sign(claim: str) -> int:
    return 1 if claim in ("positive", "nonneg-ae") else -1


class CertificationRefused(Exception):
    def __init__(self, message: str, proof: SignProof | None = None, what: str = ""):
        super().__init__(message)
        self.proof = proof
        self.what = what


class RefusedResidualNonzero(CertificationRefused):
    pass


class RefusedSignUnproved(CertificationRefused):
    pass


class PoleInRegion(RefusedSignUnproved):
    pass


@dataclass(frozen=True)
class Certificate:
    field: VectorField
    region: Region
    candidate: DulacCandidate
    k: Expr
    k_proof: SignProof
    h_proof: SignProof
    c_proof: SignProof
    residual_mode: str
    residual_max: float
    conclusion: str

    @property
    def sign(self) -> str:
        return self.k_proof.claim

    @property
    def h(self) -> Expr:
        return self.candidate.h

    @property
    def c(self) -> Expr:
        return self.candidate.c


def residual_samples(F: VectorField, cand: DulacCandidate, region: Region, env: ParameterEnv, cfg: Config) -> float:
    """Largest scaled |f1 h_x1 + f2 h_x2 - h (c - div F)| over random interior points."""
    pieces = [
        F.f1,
        F.f2,
        differentiate(cand.h, "x1"),
        differentiate(cand.h, "x2"),
        cand.h,
        cand.c,
        divergence(F),
    ]
    fns = [compile_float(p) for p in pieces]
    rng = random.Random(cfg.seed + 1)
    box = region.box(env)
    worst, done, tries = 0.0, 0, 0
    while done < cfg.residual_points and tries < 10 * cfg.residual_points:
        tries += 1
        p = {}
        for name, (lo, hi) in box.axes():
            t = (rng.random() * 0.98) + 0.01
            p[name] = float(lo) + (float(hi) - float(lo)) * t
        for name, v in env.fixed_values().items():
            p.setdefault(name, float(v))
        try:
            f1, f2, hx1, hx2, h, c, dv = (fn(p) for fn in fns)
        except (ZeroDivisionError, ValueError, OverflowError):
            continue
        lhs = f1 * hx1 + f2 * hx2
        rhs = h * (c - dv)
        scale = 1.0 + abs(f1 * hx1) + abs(f2 * hx2) + abs(h * c) + abs(h * dv)
        worst = max(worst, abs(lhs - rhs) / scale)
        done += 1
    return worst


def certify_dulac(
    F: VectorField,
    cand: DulacCandidate,
    region: Region,
    config: Config | None = None,
    *,
    c_proof: SignProof | None = None,
) -> Certificate:
    """Check every hypothesis for ``cand.h`` to be a Dulac function of ``F`` on ``region``.

    Raises a ``CertificationRefused`` subclass when any check fails.
    """
    cfg = config or Config()
    env = F.env
    Fs = F.specialized()
    h = normalize(env.fix(cand.h))
    c = normalize(env.fix(cand.c))
    cand = DulacCandidate(h, c, cand.ansatz, cand.gamma, cand.source)
    ranges = sampling_ranges(region, env)

    k = div_hF(Fs, h)
    try:
        res = zero_test(pde_residual(Fs, cand), ranges, samples=cfg.zero_samples, seed=cfg.seed)
        ident = zero_test(k - h * c, ranges, samples=cfg.zero_samples, seed=cfg.seed)
    except ZeroTestError as exc:
        raise RefusedResidualNonzero(f"residual could not be evaluated: {exc}", what="residual") from exc
    if not res.is_zero or not ident.is_zero:
        raise RefusedResidualNonzero("associated equation residual is not identically zero", what="residual")

    if denominator_vanishes(h, region, env, cfg):
        raise PoleInRegion("h has a pole in the region", None, "h")
    h_proof = prove_sign(h, region, env, "positive", cfg)
    if not h_proof.proved:
        kind = PoleInRegion if h_proof.pole else RefusedSignUnproved
        raise kind(f"h > 0 not proved ({h_proof.status}: {h_proof.reason})".rstrip(": )") + ")", h_proof, "h")

    if c_proof is None or not c_proof.proved:
        c_proof = prove_fixed_sign(c, region, env, cfg)
    if not c_proof.proved:
        raise RefusedSignUnproved(f"fixed sign of c not proved ({c_proof.status})", c_proof, "c")

    k_proof = prove_fixed_sign(k, region, env, cfg, sign=claim_sign(c_proof.claim))
    if not k_proof.proved:
        raise RefusedSignUnproved(f"fixed sign of div(hF) not proved ({k_proof.status})", k_proof, "k")

    worst = residual_samples(Fs, cand, region, env, cfg)
    if worst > cfg.residual_tol:
        raise RefusedResidualNonzero(f"sampled residual {worst:.3g} exceeds tolerance", what="residual")

    mode = "exact" if res.exact and ident.exact else "probabilistic"
    if k_proof.claim in ("positive", "negative"):
        side, strict = k_proof.claim, ""
    else:
        side = "nonnegative" if claim_sign(k_proof.claim) > 0 else "nonpositive"
        strict = " (zero only on a null set)"
    conclusion = (
        f"div(h F) is {side}{strict} on the box {region.describe()} for every parameter value "
        f"in the declared ranges, so the system has no periodic orbits contained in that box"
    )
    return Certificate(Fs, region, cand, k, k_proof, h_proof, c_proof, mode, worst, conclusion)
