"""Reader and writer for the sectioned system description files.

Example::

    [system]
    x1' = "lam - mu*x1 - alpha*x2"
    x2' = "beta*(x1 - x2)*x2 - (alpha + mu + delta)*x2"

    [params]
    lam = positive [1/2, 2]
    mu = 1
    alpha = [1/2, 2]
    beta = positive

    [region]
    kind = "positive-quadrant-box"
    x1 = [1/10, 10]
    x2 = [1/10, 10]

    [search]
    max_depth = 16

Comments start with ``#``.  Every error carries the file name and line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .config import Config, parse_kappa_grid
from .expr import ExprSyntaxError, UnknownFunctionError, parse, to_text
from .system import SIGNS, InvalidSystemError, ParameterEnv, ParamSpec, Region, VectorField

SECTIONS = ("system", "params", "region", "search")
SEARCH_KEYS = ("max_depth", "rho", "delta_zero", "kappa_grid", "exhaustive", "families", "seed", "workers")


class InputError(ValueError):
    def __init__(self, message: str, path: str = "<input>", line: int | None = None):
        self.path, self.line, self.detail = path, line, message
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


@dataclass
class InputFile:
    field: VectorField
    region: Region
    search: dict = field(default_factory=dict)
    path: str = "<input>"

    def config(self, base: Config | None = None) -> Config:
        return apply_search_overrides(base or Config(), self.search)


_SECTION = re.compile(r"^\[\s*([A-Za-z_]+)\s*\]$")
_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*'?)\s*=\s*(.*)$")
_RANGE = re.compile(r"^\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]$")


def _strip_comment(line: str) -> str:
    out, quote = [], False
    for ch in line:
        if ch == '"':
            quote = not quote
        if ch == "#" and not quote:
            break
        out.append(ch)
    return "".join(out).strip()


def _unquote(value: str, path: str, line: int) -> str:
    if len(value) >= 2 and value[0] == value[-1] == '"':
        return value[1:-1]
    raise InputError(f"expected a quoted string, got {value!r}", path, line)


def _number(text: str, path: str, line: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"invalid number {text.strip()!r}", path, line) from None


def _range(text: str, path: str, line: int) -> tuple[Fraction, Fraction]:
    m = _RANGE.match(text.strip())
    if not m:
        raise InputError(f"expected a range [lo, hi], got {text.strip()!r}", path, line)
    return _number(m.group(1), path, line), _number(m.group(2), path, line)


def _param(value: str, path: str, line: int) -> ParamSpec:
    value = value.strip()
    sign = None
    head = value.split("[", 1)[0].strip()
    if head in SIGNS:
        sign = head
        value = value[len(head) :].strip()
    elif head and not value.startswith("["):
        if re.fullmatch(r"[A-Za-z_]+", head):
            raise InputError(f"unknown sign assumption '{head}' (expected one of {', '.join(SIGNS)})", path, line)
    try:
        if not value:
            return ParamSpec.of(sign)
        if value.startswith("["):
            lo, hi = _range(value, path, line)
            return ParamSpec.of(sign, lo, hi)
        return ParamSpec.of(sign, _number(value, path, line))
    except InvalidSystemError as exc:
        raise InputError(str(exc), path, line) from None


def _bool(value: str, path: str, line: int) -> bool:
    v = value.strip().lower()
    if v in ("true", "yes", "1"):
        return True
    if v in ("false", "no", "0"):
        return False
    raise InputError(f"expected true or false, got {value.strip()!r}", path, line)


def parse_input(text: str, path: str = "<input>") -> InputFile:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            current = m.group(1).lower()
            if current not in SECTIONS:
                raise InputError(f"unknown section [{current}]", path, lineno)
            if current in sections:
                raise InputError(f"duplicate section [{current}]", path, lineno)
            sections[current] = {}
            continue
        m = _KEY.match(line)
        if not m:
            raise InputError(f"cannot parse line {line!r}", path, lineno)
        if current is None:
            raise InputError("key outside of any section", path, lineno)
        key, value = m.group(1), m.group(2).strip()
        if key in sections[current]:
            raise InputError(f"duplicate key '{key}' in [{current}]", path, lineno)
        sections[current][key] = (value, lineno)

    system = sections.get("system")
    if system is None:
        raise InputError("missing [system] section", path)
    exprs = []
    for key in ("x1'", "x2'"):
        if key not in system:
            raise InputError(f"missing equation {key} in [system]", path)
        value, lineno = system[key]
        src = _unquote(value, path, lineno)
        try:
            exprs.append(parse(src))
        except (ExprSyntaxError, UnknownFunctionError) as exc:
            raise InputError(f"{key}: {exc}", path, lineno) from None
    extra = set(system) - {"x1'", "x2'"}
    if extra:
        key = sorted(extra)[0]
        raise InputError(f"unexpected key '{key}' in [system]", path, system[key][1])

    params = {}
    for name, (value, lineno) in sections.get("params", {}).items():
        if name in ("x1", "x2", "z") or name.endswith("'"):
            raise InputError(f"'{name}' cannot be used as a parameter name", path, lineno)
        params[name] = _param(value, path, lineno)
    env = ParameterEnv.build(params)
    used = (exprs[0].symbols() | exprs[1].symbols()) - {"x1", "x2"}
    missing = sorted(used - set(params))
    if missing:
        line = system["x1'"][1] if missing[0] in exprs[0].symbols() else system["x2'"][1]
        raise InputError(f"undeclared parameter(s): {', '.join(missing)}", path, line)
    F = VectorField(exprs[0], exprs[1], env)

    reg = sections.get("region")
    if reg is None:
        raise InputError("missing [region] section", path)
    kind = "box"
    if "kind" in reg:
        kind = _unquote(reg["kind"][0], path, reg["kind"][1]) if reg["kind"][0].startswith('"') else reg["kind"][0]
    bounds = {}
    for key in ("x1", "x2"):
        if key not in reg:
            raise InputError(f"missing bounds for {key} in [region]", path)
        bounds[key] = _range(reg[key][0], path, reg[key][1])
    try:
        region = Region(bounds["x1"], bounds["x2"], kind)
    except InvalidSystemError as exc:
        line = reg.get("kind", (None, None))[1] or reg["x1"][1]
        raise InputError(str(exc), path, line) from None

    search = {}
    for key, (value, lineno) in sections.get("search", {}).items():
        if key not in SEARCH_KEYS:
            raise InputError(f"unknown [search] key '{key}'", path, lineno)
        try:
            if key in ("max_depth", "seed", "workers"):
                search[key] = int(value)
            elif key in ("rho", "delta_zero"):
                search[key] = float(value)
            elif key == "exhaustive":
                search[key] = _bool(value, path, lineno)
            elif key == "kappa_grid":
                search[key] = parse_kappa_grid(_unquote(value, path, lineno))
            else:
                names = _unquote(value, path, lineno)
                search[key] = tuple(n.strip() for n in names.split(",") if n.strip())
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"invalid value for {key}: {exc}", path, lineno) from None
    return InputFile(F, region, search, path)


def read_input(path: str) -> InputFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", path) from None
    return parse_input(text, path)


def apply_search_overrides(cfg: Config, search: dict) -> Config:
    return cfg.with_(**search) if search else cfg


def _fmt_param(spec: ParamSpec) -> str:
    if spec.fixed:
        return str(spec.lo)
    return f"{spec.sign} [{spec.lo}, {spec.hi}]"


def format_input(F: VectorField, region: Region, comment: str = "", search: dict | None = None) -> str:
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines += ["[system]", f'x1\' = "{to_text(F.f1)}"', f'x2\' = "{to_text(F.f2)}"', ""]
    if F.env.specs:
        lines.append("[params]")
        lines += [f"{n} = {_fmt_param(s)}" for n, s in F.env.specs]
        lines.append("")
    lines += [
        "[region]",
        f'kind = "{region.kind}"',
        f"x1 = [{region.x1[0]}, {region.x1[1]}]",
        f"x2 = [{region.x2[0]}, {region.x2[1]}]",
    ]
    if search:
        lines += ["", "[search]"]
        for k, v in search.items():
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, tuple):
                v = '"' + ", ".join(str(x) for x in v) + '"'
            lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
