"""Command-line entry point ``lrq``.

Exit codes: 0 all checks passed, 1 a tolerance check failed, 2 the
configuration or arguments were invalid, 3 a numerical failure (pole hit,
non-finite samples) stopped the run.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .algebra import MAX_FACTORIAL_ARG, build_spin_rep, build_subspace_rep, verify_spin_relations, verify_susy_relations
from .config import ConfigError, load_config, parse_number, shipped_configs
from .errors import InputError, LRQError, RangeError, SingularityError
from .scenario import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_PASS,
    EXIT_TOLERANCE,
    fmt,
    run_scenario,
    write_csv,
    write_result,
)

ENV_OUT = "LRQ_OUT_DIR"
DEFAULT_OUT = "lrq_out"


def _say(args, *msg):
    if not args.quiet:
        print(*msg)


def _err(msg):
    print(f"lrq: error: {msg}", file=sys.stderr)


def _out_root(args, cfg=None) -> Path:
    if args.out:
        return Path(args.out)
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    if cfg is not None and cfg.out_dir:
        return Path(cfg.out_dir)
    return Path(DEFAULT_OUT)


def _load(args):
    cfg = load_config(args.config)
    if args.steps is not None:
        cfg = cfg.with_value("grid.n_steps", str(args.steps))
    return cfg


# --- verify-algebra ---------------------------------------------------------


def cmd_verify_algebra(args) -> int:
    if args.m_max < 0 or args.k_max < 1 or args.two_j_max < 1:
        _err("need --m-max >= 0, --k-max >= 1, --two-j-max >= 1")
        return EXIT_CONFIG
    if args.m_max + args.k_max > MAX_FACTORIAL_ARG:
        _err(f"(m+k)! out of range: m_max + k_max = {args.m_max + args.k_max} > {MAX_FACTORIAL_ARG}")
        return EXIT_CONFIG
    rows, spin_rows = [], []
    for m in range(args.m_max + 1):
        for k in range(1, args.k_max + 1):
            try:
                rep = build_subspace_rep(m, k)
            except RangeError as exc:
                _err(str(exc))
                return EXIT_CONFIG
            for r in verify_susy_relations(rep, args.tol):
                rows.append((m, k, r.name, r.residual, r.passed))
    for two_j in range(1, args.two_j_max + 1):
        for r in verify_spin_relations(build_spin_rep(two_j), args.tol):
            spin_rows.append((two_j, r.name, r.residual, r.passed))

    _say(args, "m,k,relation,residual,pass")
    for row in rows:
        _say(args, ",".join(fmt(x) for x in row))
    _say(args, "two_j,relation,residual,pass")
    for row in spin_rows:
        _say(args, ",".join(fmt(x) for x in row))
    if args.out or os.environ.get(ENV_OUT):
        out = _out_root(args)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "algebra.csv", ("m", "k", "relation", "residual", "pass"), rows)
        write_csv(out / "spin_algebra.csv", ("two_j", "relation", "residual", "pass"), spin_rows)
    ok = all(r[-1] for r in rows) and all(r[-1] for r in spin_rows)
    return EXIT_PASS if ok else EXIT_TOLERANCE


# --- run ----------------------------------------------------------------------


def _run_one(cfg, out_dir: Path):
    """Run one scenario; returns ``(exit_code, summary or None, message)``."""
    try:
        result = run_scenario(cfg)
    except SingularityError as exc:
        return EXIT_NUMERICAL, None, str(exc)
    except (InputError, FloatingPointError, LRQError, ValueError) as exc:
        return EXIT_NUMERICAL, None, str(exc)
    write_result(result, out_dir, cfg.reports)
    msg = "pass" if result.passed else "fail: " + ", ".join(result.failed)
    return result.exit_code, result.summary, msg


def cmd_run(args) -> int:
    try:
        cfg = _load(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    out = _out_root(args, cfg) / cfg.name
    code, summary, msg = _run_one(cfg, out)
    if summary is None:
        _err(msg)
        return code
    for key, value in summary.items():
        _say(args, f"{key} = {fmt(value)}")
    _say(args, f"outputs written to {out}")
    return code


# --- sweep --------------------------------------------------------------------


def cmd_sweep(args) -> int:
    try:
        cfg = _load(args)
        key = args.key or cfg.sweep_key
        if not key:
            raise ConfigError("no sweep key: set sweep.key or pass --key")
        if args.values is not None:
            values = tuple(parse_number(v) for v in args.values.split(",") if v.strip())
        else:
            values = cfg.sweep_values
        if not values:
            raise ConfigError("sweep value list is empty", "sweep.values")
        points = [cfg.with_value(key, v) for v in values]
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except ValueError as exc:
        _err(f"--values: {exc}")
        return EXIT_CONFIG
    if args.jobs < 1:
        _err("--jobs must be >= 1")
        return EXIT_CONFIG

    root = _out_root(args, cfg) / f"{cfg.name}_sweep"
    dirs = [root / f"point_{i:03d}" for i in range(len(points))]
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_run_one, points, dirs))

    columns = []
    for _, summary, _ in results:
        if summary:
            columns = [c for c in summary if c not in ("name", "model")]
            break
    root.mkdir(parents=True, exist_ok=True)
    rows = []
    for v, (code, summary, msg) in zip(values, results):
        summary = summary or {}
        rows.append([v, code, msg] + [summary.get(c, "") for c in columns])
        _say(args, f"{key} = {fmt(v)}: exit {code} ({msg})")
    write_csv(root / "sweep.csv", [key, "exit_code", "message"] + columns, rows)
    if cfg.model == "fiber":
        solid_rows = [
            (s["pitch_angle"], s["solid_angle"], s["phase_plus"], s["phase_minus"])
            for _, s, _ in results
            if s
        ]
        write_csv(root / "solid_angle.csv", ("lambda", "solid_angle", "phase_plus", "phase_minus"), solid_rows)
    _say(args, f"outputs written to {root}")
    return max(code for code, _, _ in results)


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lrq",
        description="Invariant-based exact solutions for driven two-level and spin models.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help=f"output root (default: ${ENV_OUT}, outputs.directory, or ./{DEFAULT_OUT})")
        sp.add_argument("--quiet", action="store_true", help="suppress stdout reports")

    va = sub.add_parser("verify-algebra", help="check the superalgebra and spin relations")
    va.add_argument("--m-max", type=int, default=5)
    va.add_argument("--k-max", type=int, default=4)
    va.add_argument("--two-j-max", type=int, default=3)
    va.add_argument("--tol", type=float, default=1e-12)
    common(va)
    va.set_defaults(func=cmd_verify_algebra)

    names = ", ".join(shipped_configs())
    run = sub.add_parser("run", help="run one scenario")
    run.add_argument("--config", required=True, help=f"config path or shipped name ({names})")
    run.add_argument("--steps", type=int, help="override grid.n_steps")
    common(run)
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="run a scenario over a list of values of one key")
    sw.add_argument("--config", required=True, help=f"config path or shipped name ({names})")
    sw.add_argument("--key", help="override sweep.key")
    sw.add_argument("--values", help="override sweep.values (comma separated)")
    sw.add_argument("--steps", type=int, help="override grid.n_steps")
    sw.add_argument("--jobs", type=int, default=1, help="points run concurrently")
    common(sw)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
