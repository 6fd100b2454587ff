"""Plain-text reports and JSON blocks for certificates and search results.

Nothing time-dependent goes into a report, so equal inputs give
byte-identical output.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .ansatz import SearchResult
from .certify import Certificate, CertificationRefused, Counterexample, SignProof
from .config import Config
from .expr import Expr, to_text
from .system import ParameterEnv, Region, VectorField


def _q(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def _params_lines(env: ParameterEnv) -> list[str]:
    out = []
    for name, spec in env.specs:
        if spec.fixed:
            out.append(f"  {name} = {spec.lo}")
        else:
            out.append(f"  {name} = {spec.sign} [{spec.lo}, {spec.hi}]")
    return out


def _counterexample_text(ce: Counterexample) -> str:
    pt = ", ".join(f"{k}={v}" for k, v in ce.point)
    return f"({pt}) value {_q(ce.value)}{'' if ce.exact else ' (approximate)'}"


def proof_line(proof: SignProof) -> str:
    parts = [
        proof.claim,
        proof.status,
        f"boxes={proof.boxes_total}",
        f"max_depth={proof.max_depth}",
        f"undecided_volume_fraction={proof.undecided_fraction:.6g}",
    ]
    if proof.zero_mode != "exact":
        parts.append(f"zero_test={proof.zero_mode}")
    if proof.reason:
        parts.append(f"reason={proof.reason}")
    if proof.counterexample is not None:
        parts.append("counterexample=" + _counterexample_text(proof.counterexample))
    return ", ".join(parts)


def _box_line(b) -> str:
    q = b.quadruple()
    extra = "".join(f" {n}=[{lo}, {hi}]" for n, (lo, hi) in b.params if hi > lo)
    return f"  ({q[0]}, {q[1]}, {q[2]}, {q[3]}){extra}"


def header_lines(command: str, F: VectorField, region: Region, cfg: Config) -> list[str]:
    grid = ",".join(str(k) for k in cfg.kappa_grid)
    lines = [
        f"command: {command}",
        "system:",
        f'  x1\' = "{to_text(F.f1)}"',
        f'  x2\' = "{to_text(F.f2)}"',
        "params:",
    ]
    lines += _params_lines(F.env) or ["  (none)"]
    lines += [
        f"region: {region.kind} {region.describe()}",
        f"config: max_depth={cfg.max_depth} rho={cfg.rho} delta_zero={cfg.delta_zero} "
        f"seed={cfg.seed} kappa_grid={grid} exhaustive={'true' if cfg.exhaustive else 'false'}",
    ]
    return lines


def certificate_lines(cert: Certificate) -> list[str]:
    cand = cert.candidate
    lines = [
        f"family: {cand.ansatz}",
        f"source: {cand.source}",
    ]
    if cand.gamma is not None:
        lines.append(f"gamma(z) = {to_text(cand.gamma)}")
    lines += [
        f"h = {to_text(cert.h)}",
        f"c = {to_text(cert.c)}",
        f"k = div(h F) = {to_text(cert.k)}",
        f"k-sign: {proof_line(cert.k_proof)}",
        f"h-positivity: {proof_line(cert.h_proof)}",
        f"c-sign: {proof_line(cert.c_proof)}",
        f"pde-residual: {cert.residual_mode}-zero, sampled max {cert.residual_max:.3g}",
    ]
    thin = [b for p in (cert.k_proof, cert.h_proof, cert.c_proof) for b in p.undecided]
    if thin:
        lines.append("thin boxes (x1lo, x1hi, x2lo, x2hi):")
        lines += [_box_line(b) for b in thin]
    lines.append(f"conclusion: {cert.conclusion}")
    return lines


def search_report(F: VectorField, region: Region, cfg: Config, result: SearchResult, transcript: bool = False) -> str:
    lines = header_lines("search", F, region, cfg)
    if result.found:
        lines.append("result: certificate found")
        lines += certificate_lines(result.certificate)
    else:
        lines.append("result: not found")
        tested = sum(1 for t in result.transcript if t.stage != "guard")
        lines.append(f"candidates tested: {tested}")
    if transcript or cfg.exhaustive:
        lines.append("transcript:")
        lines += ["  " + t.line() for t in result.transcript]
    return "\n".join(lines) + "\n"


def verify_report(F, region, cfg, cert: Certificate | None, refusal: CertificationRefused | None, h: Expr) -> str:
    lines = header_lines("verify", F, region, cfg)
    if cert is not None:
        lines.append("result: certified")
        lines += certificate_lines(cert)
    else:
        lines.append("result: refused")
        lines.append(f"h = {to_text(h)}")
        lines.append(f"reason: {refusal}")
        if refusal.proof is not None:
            lines.append(f"failing proof ({refusal.what}): {proof_line(refusal.proof)}")
            if refusal.proof.undecided:
                lines.append("undecided boxes (x1lo, x1hi, x2lo, x2hi):")
                lines += [_box_line(b) for b in refusal.proof.undecided[:50]]
    return "\n".join(lines) + "\n"


# -- machine block -----------------------------------------------------------------


def _region_json(region: Region) -> dict:
    return {
        "kind": region.kind,
        "x1": [str(region.x1[0]), str(region.x1[1])],
        "x2": [str(region.x2[0]), str(region.x2[1])],
    }


def _params_json(env: ParameterEnv) -> dict:
    return {n: {"sign": s.sign, "lo": str(s.lo), "hi": str(s.hi)} for n, s in env.specs}


def _ce_json(ce: Counterexample | None):
    if ce is None:
        return None
    return {"point": {k: str(v) for k, v in ce.point}, "value": _q(ce.value), "exact": ce.exact}


def machine_block(
    F: VectorField,
    region: Region,
    proof: SignProof | None,
    status: str,
    h: Expr | None = None,
    c: Expr | None = None,
    k: Expr | None = None,
) -> dict:
    return {
        "claim": proof.claim if proof else None,
        "status": status,
        "counterexample": _ce_json(proof.counterexample) if proof else None,
        "boxes_total": proof.boxes_total if proof else 0,
        "undecided_volume_fraction": proof.undecided_fraction if proof else 0.0,
        "max_depth": proof.max_depth if proof else 0,
        "h": to_text(h) if h is not None else None,
        "c": to_text(c) if c is not None else None,
        "k": to_text(k) if k is not None else None,
        "region": _region_json(region),
        "params": _params_json(F.env),
    }


def certificate_block(cert: Certificate) -> dict:
    return machine_block(cert.field, cert.region, cert.k_proof, cert.k_proof.status, cert.h, cert.c, cert.k)


def dumps(block: dict) -> str:
    return json.dumps(block, indent=2) + "\n"
