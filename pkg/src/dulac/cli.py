"""Command line front end: ``dulac search|verify|sample|corpus``."""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import corpus
from .ansatz import BudgetExhausted, search
from .certify import (
    CertificationRefused,
    PoleInRegion,
    RefusedResidualNonzero,
    certify_dulac,
)
from .config import Config, parse_kappa_grid
from .expr import (
    EvaluationDomainError,
    ExprSyntaxError,
    UnknownFunctionError,
    eval_point,
    normalize,
    parse,
)
from .inputfile import InputError, read_input
from .report import certificate_block, dumps, machine_block, search_report, verify_report
from .system import div_hF, divergence

EXIT_OK, EXIT_NOT_FOUND, EXIT_DISPROVED, EXIT_INPUT = 0, 1, 2, 3

_GLOBAL_FLAGS = ("max_depth", "rho", "delta_zero", "kappa_grid", "json", "exhaustive", "seed", "workers", "transcript")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--max-depth", type=int, default=s, help="bisection depth limit (default 24)")
    p.add_argument("--rho", type=float, default=s, help="thin-set volume fraction (default 1e-4)")
    p.add_argument("--delta-zero", type=float, default=s, help="thin-box width limit (default 1e-3)")
    p.add_argument("--kappa-grid", default=s, help='gamma coefficient grid (default "±1,±2,±3,±4,±1/2")')
    p.add_argument("--json", metavar="PATH", default=s, help="write the machine-readable block to PATH")
    p.add_argument("--exhaustive", action="store_true", default=s, help="keep searching after the first certificate")
    p.add_argument("--seed", type=int, default=s, help="seed for sampling and probabilistic zero tests")
    p.add_argument("--workers", type=int, default=s, help="worker processes for search (0 = all CPUs)")
    p.add_argument("--transcript", action="store_true", default=s, help="include the candidate transcript")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="dulac",
        description="Construct and certify Dulac functions for planar polynomial/rational systems.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common], help="search the ansatz families for a Dulac function")
    p.add_argument("file")
    p.add_argument("--c", dest="c", help="use this c and test every family for dependence on z")

    p = sub.add_parser("verify", parents=[common], help="certify a user-supplied h")
    p.add_argument("file")
    p.add_argument("--h", dest="h", required=True, help="candidate Dulac function")
    p.add_argument("--c", dest="c", help="cofactor c (default: div(hF)/h)")

    p = sub.add_parser("sample", parents=[common], help="print a CSV grid of k, div F or h")
    p.add_argument("file")
    p.add_argument("--expr", choices=("k", "divF", "h"), default="divF")
    p.add_argument("--grid", type=int, default=11)
    p.add_argument("--h", dest="h", help="h for --expr k|h (default: run a search)")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")

    p = sub.add_parser("corpus", parents=[common], help="list or export built-in systems")
    csub = p.add_subparsers(dest="corpus_command", required=True)
    csub.add_parser("list", help="list entries")
    e = csub.add_parser("export", help="print an entry as an input file")
    e.add_argument("name")
    e.add_argument("-o", "--output", help="write here instead of stdout")
    return parser


def _flag(args, name, default=None):
    return getattr(args, name, default)


def make_config(args, file_search: dict | None = None) -> Config:
    cfg = Config()
    if file_search:
        cfg = cfg.with_(**file_search)
    changes = {}
    for name in ("max_depth", "rho", "delta_zero", "seed", "workers"):
        v = _flag(args, name)
        if v is not None:
            changes[name] = v
    if _flag(args, "kappa_grid") is not None:
        changes["kappa_grid"] = parse_kappa_grid(args.kappa_grid)
    if _flag(args, "exhaustive"):
        changes["exhaustive"] = True
    cfg = cfg.with_(**changes) if changes else cfg
    if cfg.workers == 0:
        cfg = cfg.with_(workers=os.cpu_count() or 1)
    return cfg


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_expr(text: str, what: str):
    try:
        return parse(text)
    except (ExprSyntaxError, UnknownFunctionError) as exc:
        raise InputError(f"{what}: {exc}", f"--{what}") from None


def _check_symbols(e, F, what):
    unknown = e.symbols() - {"x1", "x2"} - set(F.env.names())
    if unknown:
        raise InputError(f"undeclared symbol(s) in --{what}: {', '.join(sorted(unknown))}", f"--{what}")


def cmd_search(args) -> int:
    inp = read_input(args.file)
    cfg = make_config(args, inp.search)
    c = None
    if _flag(args, "c"):
        c = _parse_expr(args.c, "c")
        _check_symbols(c, inp.field, "c")
    try:
        result = search(inp.field, inp.region, cfg, c=c)
    except BudgetExhausted as exc:
        _err(str(exc))
        return EXIT_NOT_FOUND
    want_transcript = bool(_flag(args, "transcript"))
    sys.stdout.write(search_report(inp.field, inp.region, cfg, result, want_transcript))
    if _flag(args, "json"):
        if result.found:
            block = certificate_block(result.certificate)
        else:
            block = machine_block(inp.field, inp.region, None, "NotFound")
        _write(args.json, dumps(block))
    if result.found:
        return EXIT_OK
    if want_transcript and result.all_disproved:
        return EXIT_DISPROVED
    return EXIT_NOT_FOUND


def _verify(inp, cfg, h_text: str, c_text: str | None):
    F = inp.field
    h = _parse_expr(h_text, "h")
    _check_symbols(h, F, "h")
    if c_text is not None:
        c = _parse_expr(c_text, "c")
        _check_symbols(c, F, "c")
    else:
        Fs = F.specialized()
        hs = normalize(F.env.fix(h))
        if hs == normalize(parse("0")):
            raise InputError("h must not be identically zero", "--h")
        c = normalize(div_hF(Fs, hs) / hs)
    from .system import DulacCandidate

    cand = DulacCandidate(h, c, "user", None, "user")
    try:
        return certify_dulac(F, cand, inp.region, cfg), None, h
    except CertificationRefused as exc:
        return None, exc, h


def cmd_verify(args) -> int:
    inp = read_input(args.file)
    cfg = make_config(args, inp.search)
    cert, refusal, h = _verify(inp, cfg, args.h, _flag(args, "c"))
    sys.stdout.write(verify_report(inp.field, inp.region, cfg, cert, refusal, h))
    if _flag(args, "json"):
        if cert is not None:
            block = certificate_block(cert)
        else:
            status = refusal.proof.status if refusal.proof is not None else type(refusal).__name__
            block = machine_block(inp.field, inp.region, refusal.proof, status, h)
        _write(args.json, dumps(block))
    if cert is not None:
        return EXIT_OK
    if isinstance(refusal, PoleInRegion):
        _err(f"{args.file}: {refusal}")
        return EXIT_INPUT
    if isinstance(refusal, RefusedResidualNonzero):
        return EXIT_DISPROVED
    if refusal.proof is not None and refusal.proof.disproved:
        return EXIT_DISPROVED
    return EXIT_NOT_FOUND


def grid_points(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
    if n == 1:
        return [(lo + hi) / 2]
    return [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]


def _fmt_value(v) -> str:
    return repr(float(v))


def sample_rows(e, region, env, n: int) -> list[str]:
    """CSV lines (header included), x1-major; parameters at their range midpoints."""
    base = env.midpoint()
    rows = ["x1,x2,value"]
    for a in grid_points(*region.x1, n):
        for b in grid_points(*region.x2, n):
            point = dict(base, x1=a, x2=b)
            try:
                v = _fmt_value(eval_point(e, point))
            except (EvaluationDomainError, ZeroDivisionError):
                v = "nan"
            rows.append(f"{float(a)!r},{float(b)!r},{v}")
    return rows


def cmd_sample(args) -> int:
    inp = read_input(args.file)
    cfg = make_config(args, inp.search)
    if args.grid < 1:
        raise InputError("--grid must be at least 1", "--grid")
    F = inp.field
    if args.expr == "divF":
        e = divergence(F)
    else:
        if _flag(args, "h"):
            h = _parse_expr(args.h, "h")
            _check_symbols(h, F, "h")
        else:
            result = search(F, inp.region, cfg)
            if not result.found:
                _err("no Dulac function found; pass --h to sample k or h")
                return EXIT_NOT_FOUND
            h = result.certificate.candidate.h
        e = h if args.expr == "h" else div_hF(F, h)
    _write(_flag(args, "output"), "\n".join(sample_rows(e, inp.region, F.env, args.grid)) + "\n")
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.corpus_command == "list":
        for e in corpus.entries():
            fam = e.family or "none"
            print(f"{e.name:24s} {fam:14s} {e.location}")
        return EXIT_OK
    try:
        text = corpus.export(args.name)
    except KeyError as exc:
        raise InputError(exc.args[0], "corpus") from None
    _write(_flag(args, "output"), text)
    return EXIT_OK


COMMANDS = {"search": cmd_search, "verify": cmd_verify, "sample": cmd_sample, "corpus": cmd_corpus}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for Disproved
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        _err(str(exc))
        return EXIT_INPUT
    except ValueError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
