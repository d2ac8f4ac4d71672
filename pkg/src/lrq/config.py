"""Scenario configuration: flat ``key = value`` text with dotted keys.

Example::

    name = jc_resonance
    model = jc
    rep.m = 1
    rep.k = 1
    drive.omega.family = constant
    drive.omega.c = 1.0
    ...

Numbers may be written as arithmetic on literals and ``pi``
(``pi/3``, ``0.2+0.1j``). Lists are comma separated. Unknown keys are
errors.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import MAX_FACTORIAL_ARG
from .drives import FAMILIES, Profile

MODELS = ("jc", "spin", "fiber")
REPORTS = ("trajectory", "phases", "oracle")
DRIVE_NAMES = {"jc": ("omega", "omega0", "g"), "spin": ("c0", "theta", "phi"), "fiber": ()}
MIN_STEPS = 100


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "tau": math.tau}


def parse_number(text: str):
    """Evaluate a numeric literal expression; ``int``, ``float`` or ``complex``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ValueError(f"not a numeric expression: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ZeroDivisionError, OverflowError) as exc:
        raise ValueError(f"not a numeric expression: {text!r}") from exc
    if not (value == value and abs(value) != math.inf):
        raise ValueError(f"non-finite value {text!r}")
    return value


def parse_text(text: str) -> dict[str, tuple[int, str]]:
    """Split config text into ``{key: (line_number, raw_value)}``."""
    entries: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=lineno)
        if key in entries:
            raise ConfigError(f"duplicate key (first set on line {entries[key][0]})", key, lineno)
        entries[key] = (lineno, value)
    return entries


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: str
    entries: dict = field(repr=False, compare=False)
    rep: dict = field(default_factory=dict)
    drives: dict = field(default_factory=dict)
    lambda0: float | None = None
    gamma0: float | None = None
    T: float = 10.0
    n_steps: int = 10_000
    oracle_substeps: int = 10
    residual_tol: float = 1e-6
    fidelity_tol: float = 1e-6
    phase_tol: float = 1e-5
    out_dir: str | None = None
    reports: tuple = REPORTS
    helix: dict = field(default_factory=dict)
    path_file: str | None = None
    sweep_key: str | None = None
    sweep_values: tuple = ()

    def with_value(self, key: str, value) -> "ScenarioConfig":
        """A copy with one scalar entry replaced (validated again)."""
        if key.startswith("sweep.") or key in ("name", "model"):
            raise ConfigError("cannot sweep this key", key)
        entries = dict(self.entries)
        line = entries.get(key, (None, ""))[0]
        entries[key] = (line, value if isinstance(value, str) else repr(value))
        return build_config(entries)


def _num(entries, key, kind=float, required=True, default=None):
    if key not in entries:
        if required:
            raise ConfigError("missing required key", key)
        return default
    line, raw = entries[key]
    try:
        v = parse_number(raw)
    except ValueError as exc:
        raise ConfigError(str(exc), key, line) from None
    if kind is int:
        if isinstance(v, complex) or float(v) != int(v):
            raise ConfigError(f"expected an integer, got {raw!r}", key, line)
        return int(v)
    if kind is float:
        if isinstance(v, complex):
            raise ConfigError(f"expected a real number, got {raw!r}", key, line)
        return float(v)
    return v


def _num_list(entries, key):
    line, raw = entries[key]
    items = [s for s in (x.strip() for x in raw.split(",")) if s]
    try:
        return tuple(parse_number(s) for s in items)
    except ValueError as exc:
        raise ConfigError(str(exc), key, line) from None


def _profile(entries, prefix, used):
    fkey = f"{prefix}.family"
    if fkey not in entries:
        raise ConfigError("missing function family", fkey)
    line, family = entries[fkey]
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}", fkey, line)
    used.add(fkey)
    coeffs = []
    for c in FAMILIES[family]:
        key = f"{prefix}.{c}"
        used.add(key)
        if family == "tabulated":
            if key not in entries:
                raise ConfigError("missing required key", key)
            coeffs.append(_num_list(entries, key))
        elif family in ("sinusoid", "rotating") and c in ("phase", "offset"):
            coeffs.append(_num(entries, key, complex if c == "offset" else float, required=False, default=0.0))
        elif family in ("sinusoid", "rotating") and c == "freq":
            coeffs.append(_num(entries, key, float))
        else:
            coeffs.append(_num(entries, key, complex))
    try:
        return Profile(family, tuple(coeffs))
    except ValueError as exc:
        raise ConfigError(str(exc), fkey, line) from None


def build_config(entries: dict[str, tuple[int, str]]) -> ScenarioConfig:
    used = set()

    def take(key):
        used.add(key)
        return key

    if "model" not in entries:
        raise ConfigError("missing required key", "model")
    line, model = entries[take("model")]
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; choose from {MODELS}", "model", line)
    name = entries[take("name")][1] if "name" in entries else model

    kw = {}
    if model == "jc":
        m = _num(entries, take("rep.m"), int)
        k = _num(entries, take("rep.k"), int)
        if m < 0 or k < 1:
            raise ConfigError("need rep.m >= 0 and rep.k >= 1", "rep.k")
        if m + k > MAX_FACTORIAL_ARG:
            raise ConfigError(f"(m+k)! out of range: m+k={m + k} > {MAX_FACTORIAL_ARG}", "rep.m")
        kw["rep"] = {"m": m, "k": k}
    elif model == "spin":
        two_j = _num(entries, take("rep.two_j"), int)
        if two_j < 1:
            raise ConfigError("rep.two_j must be >= 1", "rep.two_j")
        kw["rep"] = {"two_j": two_j}
    else:
        kw["rep"] = {"two_j": 2}

    kw["drives"] = {d: _profile(entries, f"drive.{d}", used) for d in DRIVE_NAMES[model]}
    for d in DRIVE_NAMES[model]:
        if d != "g" and kw["drives"][d].is_complex:
            raise ConfigError("this coefficient must be real", f"drive.{d}.family")

    if model == "fiber":
        if "path.file" in entries:
            kw["path_file"] = entries[take("path.file")][1]
        else:
            helix = {
                "n_turns": _num(entries, take("helix.n_turns"), float, required=False, default=1.0),
                "ramp": _num(entries, take("helix.ramp"), float, required=False, default=0.0),
            }
            if "helix.pitch_angle" in entries:
                if "helix.radius" in entries or "helix.pitch" in entries:
                    raise ConfigError("give either helix.pitch_angle or helix.radius/pitch", "helix.pitch_angle")
                helix["pitch_angle"] = _num(entries, take("helix.pitch_angle"), float)
                if not 0 < helix["pitch_angle"] < math.pi:
                    raise ConfigError("pitch angle must lie in (0, pi)", "helix.pitch_angle", entries["helix.pitch_angle"][0])
            else:
                helix["radius"] = _num(entries, take("helix.radius"), float)
                helix["pitch"] = _num(entries, take("helix.pitch"), float)
                if helix["radius"] <= 0 or helix["pitch"] <= 0:
                    raise ConfigError("helix radius and pitch must be positive", "helix.radius")
            if helix["n_turns"] <= 0:
                raise ConfigError("n_turns must be positive", "helix.n_turns")
            kw["helix"] = helix

    kw["lambda0"] = _num(entries, take("init.lambda0"), float, required=False)
    kw["gamma0"] = _num(entries, take("init.gamma0"), float, required=False)
    if model == "fiber" and (kw["lambda0"] is not None or kw["gamma0"] is not None):
        raise ConfigError("fiber paths fix their own initial angles", "init.lambda0")

    kw["T"] = _num(entries, take("grid.T"), float, required=model != "fiber", default=2 * math.pi)
    if not kw["T"] > 0:
        raise ConfigError("grid.T must be positive", "grid.T", entries["grid.T"][0])
    kw["n_steps"] = _num(entries, take("grid.n_steps"), int)
    if kw["n_steps"] < MIN_STEPS:
        raise ConfigError(f"grid.n_steps must be >= {MIN_STEPS}, got {kw['n_steps']}", "grid.n_steps", entries["grid.n_steps"][0])
    kw["oracle_substeps"] = _num(entries, take("grid.oracle_substeps"), int, required=False, default=10)
    if kw["oracle_substeps"] < 1:
        raise ConfigError("grid.oracle_substeps must be >= 1", "grid.oracle_substeps")

    for tol in ("residual_tol", "fidelity_tol", "phase_tol"):
        key = take(f"tolerances.{tol}")
        if key in entries:
            v = _num(entries, key, float)
            if not v > 0:
                raise ConfigError("tolerance must be positive", key, entries[key][0])
            kw[tol] = v

    if "outputs.directory" in entries:
        kw["out_dir"] = entries[take("outputs.directory")][1]
    if "outputs.reports" in entries:
        line, raw = entries[take("outputs.reports")]
        reps = tuple(s.strip() for s in raw.split(",") if s.strip())
        bad = [r for r in reps if r not in REPORTS]
        if bad:
            raise ConfigError(f"unknown report(s) {bad}; choose from {REPORTS}", "outputs.reports", line)
        kw["reports"] = reps

    if "sweep.key" in entries:
        kw["sweep_key"] = entries[take("sweep.key")][1]
    if "sweep.values" in entries:
        kw["sweep_values"] = _num_list(entries, take("sweep.values"))

    unknown = sorted(set(entries) - used, key=lambda k: entries[k][0])
    if unknown:
        k = unknown[0]
        raise ConfigError("unknown key", k, entries[k][0])
    return ScenarioConfig(name=name, model=model, entries=dict(entries), **kw)


def load_config(path_or_name: str | Path) -> ScenarioConfig:
    """Load a config file, or a shipped config by bare name (``jc_resonance``)."""
    p = Path(path_or_name)
    if p.is_file():
        text = p.read_text()
    else:
        shipped = resources.files("lrq") / "configs" / f"{path_or_name}.cfg"
        if not shipped.is_file():
            raise ConfigError(f"no config file {str(path_or_name)!r} and no shipped config by that name")
        text = shipped.read_text()
    return build_config(parse_text(text))


def shipped_configs() -> list[str]:
    root = resources.files("lrq") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))
