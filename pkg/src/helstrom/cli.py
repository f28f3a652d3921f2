"""Command-line front end: ``point``, ``grid`` and ``converge``.

Settings are layered: command-line flags, then ``HELSTROM_*`` environment
variables, then a ``key=value`` config file (``--config``), then defaults.
Exit status is 0 on success, 2 for bad arguments, 3 for numerical failure
and 4 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any

from . import __version__
from .distinguish import (
    IllConditionedError,
    TruncationError,
    gain_record,
    gram_subspace_pe,
    mixed_pair,
    probability_of_error,
    pure_pair,
    pure_pe_analytic,
)
from .eig import DEFAULT_TOL, ConvergenceError
from .fock import PAPER_DIM, Displacement, suggest_dim
from .sweep import CellError, GridSpec, format_float, run_grid, write_grid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

ENV_PREFIX = "HELSTROM_"
CONFIG_KEYS = {"dim", "auto_dim", "eig_tol", "jobs", "x_range", "p_range", "format"}


class UsageError(ValueError):
    pass


def _parse_range(raw: str) -> tuple[float, float, int]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must look like a:b:n, got {raw!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"range must look like a:b:n, got {raw!r}") from None
    if lo > hi or n < 1:
        raise UsageError(f"bad range {raw!r}: need a <= b and n >= 1")
    return lo, hi, n


def _parse_dims(raw: str) -> list[int]:
    try:
        dims = [int(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--dims must be comma-separated integers, got {raw!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise UsageError("--dims needs at least one positive integer")
    if dims != sorted(dims):
        raise UsageError("--dims must be ascending")
    return dims


def load_config(path: str | Path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def _layer(args: argparse.Namespace, cfg: dict[str, str], name: str, default: Any) -> Any:
    """Value of setting ``name`` as a string (or the flag's own value), highest layer first."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    env = os.environ.get(ENV_PREFIX + name.upper())
    if env is not None and env != "":
        return env
    return cfg.get(name, default)


def _number(raw: Any, kind: type, name: str) -> Any:
    try:
        return kind(raw)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be {kind.__name__}, got {raw!r}") from None


def resolve_settings(args: argparse.Namespace) -> dict[str, Any]:
    cfg = load_config(args.config) if args.config else {}
    out: dict[str, Any] = {}

    # --dim and --auto-dim share one precedence slot.
    if args.dim is not None or args.auto_dim is not None:
        dim, auto = args.dim, args.auto_dim
    elif os.environ.get(ENV_PREFIX + "DIM"):
        dim, auto = os.environ[ENV_PREFIX + "DIM"], None
    elif "dim" in cfg or "auto_dim" in cfg:
        if "dim" in cfg and "auto_dim" in cfg:
            raise UsageError("config file sets both dim and auto_dim")
        dim, auto = cfg.get("dim"), cfg.get("auto_dim")
    else:
        dim, auto = PAPER_DIM, None
    out["dim"] = None if dim is None else _number(dim, int, "dim")
    out["auto_dim"] = None if auto is None else _number(auto, float, "auto_dim")
    if out["dim"] is not None and out["dim"] < 1:
        raise UsageError(f"dim must be positive, got {out['dim']}")
    if out["auto_dim"] is not None and not 0.0 < out["auto_dim"] < 1.0:
        raise UsageError(f"auto-dim tolerance must lie in (0, 1), got {out['auto_dim']}")

    out["eig_tol"] = _number(_layer(args, cfg, "eig_tol", DEFAULT_TOL), float, "eig_tol")
    if not out["eig_tol"] > 0.0:
        raise UsageError("eig-tol must be positive")

    if args.command == "grid":
        jobs = _number(_layer(args, cfg, "jobs", os.cpu_count() or 1), int, "jobs")
        if jobs < 1:
            raise UsageError("jobs must be at least 1")
        out["jobs"] = jobs
        out["x_range"] = _parse_range(str(_layer(args, cfg, "x_range", "0:3:61")))
        out["p_range"] = _parse_range(str(_layer(args, cfg, "p_range", "0:3:61")))
        fmt = _layer(args, cfg, "format", "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {fmt!r}")
        out["format"] = fmt
    return out


def _point_dim(settings: dict[str, Any], x: float, p: float) -> int:
    if settings["auto_dim"] is not None:
        return suggest_dim([*pure_pair(x, p), *mixed_pair(x, p)], settings["auto_dim"])
    return settings["dim"]


def cmd_point(args: argparse.Namespace, settings: dict[str, Any]) -> int:
    x, p = args.x, args.p
    Displacement(x, p)
    dim = _point_dim(settings, x, p)
    tol = settings["eig_tol"]
    pure = probability_of_error(*pure_pair(x, p), dim=dim, tol=tol)
    mixed = probability_of_error(*mixed_pair(x, p), dim=dim, tol=tol)
    rec = gain_record(x, p, pure, mixed)
    payload: dict[str, Any] = {
        **asdict(rec),
        "dim_used": dim,
        "trace_norm_pure": pure.trace_distance_sum,
        "trace_norm_mixed": mixed.trace_distance_sum,
        "max_norm_deficit": max(pure.max_norm_deficit, mixed.max_norm_deficit),
    }
    if args.oracle:
        analytic = pure_pe_analytic(Displacement(x, p), Displacement(-x, p))
        gram = gram_subspace_pe(*mixed_pair(x, p), tol=tol)
        payload.update(
            pe_pure_analytic=analytic,
            pe_mixed_gram=gram,
            delta_pure=rec.pe_pure - analytic,
            delta_mixed=rec.pe_mixed - gram,
        )
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        width = max(len(k) for k in payload)
        for key, value in payload.items():
            shown = value if isinstance(value, int) else format_float(value)
            print(f"{key:<{width}}  {shown}")
    return EXIT_OK


def cmd_grid(args: argparse.Namespace, settings: dict[str, Any]) -> int:
    (x0, x1, nx), (p0, p1, np_) = settings["x_range"], settings["p_range"]
    try:
        spec = GridSpec(
            x_min=x0, x_max=x1, x_steps=nx,
            p_min=p0, p_max=p1, p_steps=np_,
            dim=settings["dim"], auto_tol=settings["auto_dim"],
            eig_tol=settings["eig_tol"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows, manifest = run_grid(spec, jobs=settings["jobs"])
    side = write_grid(rows, manifest, args.out, settings["format"])
    print(f"wrote {len(rows)} rows to {args.out} (dim {manifest.dim_used}); manifest {side}", file=sys.stderr)
    return EXIT_OK


def cmd_converge(args: argparse.Namespace, settings: dict[str, Any]) -> int:
    x, p = args.x, args.p
    Displacement(x, p)
    dims = _parse_dims(args.dims)
    tol = settings["eig_tol"]
    analytic = pure_pe_analytic(Displacement(x, p), Displacement(-x, p))
    try:
        gram: float | None = gram_subspace_pe(*mixed_pair(x, p), tol=tol)
    except IllConditionedError as exc:
        print(f"warning: no Gram reference for the mixed pair: {exc}", file=sys.stderr)
        gram = None
    table = []
    for dim in dims:
        pure = probability_of_error(*pure_pair(x, p), dim=dim, tol=tol)
        mixed = probability_of_error(*mixed_pair(x, p), dim=dim, tol=tol)
        table.append({
            "dim": dim,
            "pe_pure": pure.pe,
            "pe_mixed": mixed.pe,
            "delta_pure": pure.pe - analytic,
            "delta_mixed": None if gram is None else mixed.pe - gram,
            "max_norm_deficit": max(pure.max_norm_deficit, mixed.max_norm_deficit),
        })
    if args.json:
        print(json.dumps({"x": x, "p": p, "pe_pure_analytic": analytic, "pe_mixed_gram": gram, "rows": table}, indent=2))
        return EXIT_OK
    print(f"# x={format_float(x)} p={format_float(p)} pe_pure_analytic={format_float(analytic)} "
          f"pe_mixed_gram={'n/a' if gram is None else format_float(gram)}")
    cols = list(table[0])
    print("\t".join(cols))
    for row in table:
        print("\t".join(str(v) if isinstance(v, int) else "n/a" if v is None else format_float(v)
                        for v in row.values()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    trunc = common.add_mutually_exclusive_group()
    trunc.add_argument("--dim", type=int, default=None, metavar="N",
                       help=f"fixed Fock truncation (default {PAPER_DIM})")
    trunc.add_argument("--auto-dim", type=float, default=None, metavar="TOL",
                       help="pick the truncation so every norm deficit is below TOL (never under 50)")
    common.add_argument("--eig-tol", type=float, default=None, metavar="T",
                        help=f"off-diagonal tolerance of the eigensolver (default {DEFAULT_TOL:g})")
    common.add_argument("--config", default=None, metavar="PATH", help="key=value settings file")

    parser = argparse.ArgumentParser(
        prog="helstrom",
        description="Distinguishability of pure and mixed coherent-state pairs via the Helstrom error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", parents=[common], help="evaluate one (x, p)")
    point.add_argument("--x", type=float, required=True)
    point.add_argument("--p", type=float, required=True)
    point.add_argument("--oracle", action="store_true", help="also print the analytic and Gram references")
    point.add_argument("--json", action="store_true")

    grid = sub.add_parser("grid", parents=[common], help="sweep the information gain over a grid")
    grid.add_argument("--x-range", default=None, metavar="a:b:n", help="default 0:3:61")
    grid.add_argument("--p-range", default=None, metavar="a:b:n", help="default 0:3:61")
    grid.add_argument("--jobs", type=int, default=None, metavar="K")
    grid.add_argument("--format", choices=["csv", "json"], default=None)
    grid.add_argument("--out", required=True, metavar="PATH")

    conv = sub.add_parser("converge", parents=[common], help="PE against truncation size")
    conv.add_argument("--x", type=float, required=True)
    conv.add_argument("--p", type=float, required=True)
    conv.add_argument("--dims", default="10,20,30,40,50", metavar="N,N,...")
    conv.add_argument("--json", action="store_true")
    return parser


COMMANDS = {"point": cmd_point, "grid": cmd_grid, "converge": cmd_converge}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_settings(args)
        return COMMANDS[args.command](args, settings)
    except UsageError as exc:
        print(f"helstrom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CellError as exc:
        print(f"helstrom: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConvergenceError, IllConditionedError, TruncationError) as exc:
        print(f"helstrom: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"helstrom: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"helstrom: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
