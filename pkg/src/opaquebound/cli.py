"""Command line front end.

Exit codes: 0 certificate valid / barrier opaque, 1 certificate invalid or
barrier misses lines, 2 bad configuration or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .barrier_lab import (BODIES, BarrierFormatError, barrier_to_dict, circle_barrier,
                          jones_length_lower_check, jones_square_barrier,
                          load_barrier, save_barrier, square_boundary_barrier,
                          total_length, validate)
from .disc_bound import R0, T0, InfeasibleParameters, check_feasible, disc_lower_bound
from .square_bound import SquareParams, VacuousParameters, square_case_split

log = logging.getLogger("opaquebound")

EXIT_OK, EXIT_INVALID, EXIT_CONFIG = 0, 1, 2
SIG_DIGITS = 12


class ConfigError(ValueError):
    pass


def _round(obj: Any) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out.extend(_flatten(v, f"{prefix}{k}."))
        return out
    if isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (dict, list)):
        out = []
        for i, v in enumerate(obj):
            out.extend(_flatten(v, f"{prefix}{i}."))
        return out
    return [(prefix.rstrip("."), obj)]


def render(record: dict, fmt: str) -> str:
    rec = _round(record)
    if fmt == "json":
        return json.dumps(rec, indent=2) + "\n"
    rows = _flatten(rec)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        w.writerows(rows)
        return buf.getvalue()
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in rows)


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _opt(args: argparse.Namespace, cfg: dict, name: str, default: Any = None) -> Any:
    """Flag value, else config-file value, else the default."""
    v = getattr(args, name, None)
    if v is not None:
        return v
    return cfg.get(name, default)


def _threads(args: argparse.Namespace, cfg: dict) -> int:
    n = _opt(args, cfg, "threads")
    if n is None:
        env = os.environ.get("OPAQUE_THREADS")
        try:
            n = int(env) if env else 1
        except ValueError as exc:
            raise ConfigError(f"OPAQUE_THREADS must be an integer, got {env!r}") from exc
    n = int(n)
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def _pair(text: Any, kind=float) -> tuple:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated values, got {text!r}")
    try:
        return kind(parts[0]), kind(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad pair {text!r}: {exc}") from exc


def _gamma_neighbor(value: Any) -> float | None:
    if value is None:
        return 0.124
    if str(value) == "optimal":
        return None
    return float(value)


def _disc_certificate(args, cfg):
    at = _opt(args, cfg, "at")
    grid = _pair(_opt(args, cfg, "grid", "200,200"), int)
    refine = int(_opt(args, cfg, "refine", 40))
    gamma = _gamma_neighbor(_opt(args, cfg, "gamma_neighbor"))
    threads = _threads(args, cfg)
    if at is not None:
        r, t = _pair(at)
        check_feasible(r, t)
        target = 1.076e-6 if (r, t) == (R0, T0) else 0.0
        return disc_lower_bound(r, t, gamma_neighbor=gamma, target=target)
    return disc_lower_bound(search=True, grid=grid, refine_iters=refine,
                            gamma_neighbor=gamma, threads=threads)


# SquareParams field -> option name (the disc command owns --gamma-neighbor)
SQUARE_OPTIONS = {
    "zeta": "zeta", "t": "t", "bout_threshold": "bout_threshold",
    "gamma_neighbor": "gamma_neighbor_sq", "gamma_opposing": "gamma_opposing",
    "D_neighbor": "d_neighbor", "D_opposing": "d_opposing",
}


def _square_params(args, cfg) -> SquareParams:
    defaults = SquareParams()
    kw = {}
    for field_name, opt_name in SQUARE_OPTIONS.items():
        v = _opt(args, cfg, opt_name)
        kw[field_name] = float(v) if v is not None else getattr(defaults, field_name)
    return SquareParams(**kw)


def cmd_disc_bound(args, cfg) -> int:
    cert = _disc_certificate(args, cfg)
    record = {"command": "disc-bound", **cert.to_dict()}
    emit(render(record, args.format), args.output)
    ok = cert.valid and cert.final_bound >= 1.076e-6
    return EXIT_OK if ok else EXIT_INVALID


def cmd_square_bound(args, cfg) -> int:
    params = _square_params(args, cfg)
    samples = int(_opt(args, cfg, "samples", 100_000))
    cert = square_case_split(params, samples=samples)
    record = {"command": "square-bound", **cert.to_dict()}
    emit(render(record, args.format), args.output)
    return EXIT_OK if cert.valid and cert.final_bound > 0 else EXIT_INVALID


def cmd_certify(args, cfg) -> int:
    disc = _disc_certificate(args, cfg)
    square = square_case_split(_square_params(args, cfg),
                               samples=int(_opt(args, cfg, "samples", 100_000)))
    record = {"command": "certify", "disc": disc.to_dict(), "square": square.to_dict()}
    emit(render(record, args.format), args.output)
    ok = disc.valid and square.valid and disc.final_bound >= 1.076e-6
    return EXIT_OK if ok else EXIT_INVALID


def cmd_validate_barrier(args, cfg) -> int:
    body = _opt(args, cfg, "body", "disc")
    if body not in BODIES:
        raise ConfigError(f"body must be one of {BODIES}")
    barrier = load_barrier(args.file)
    n_alpha = int(_opt(args, cfg, "n_alpha", 1000))
    n_offset = int(_opt(args, cfg, "n_offset", 1000))
    if n_alpha < 1 or n_offset < 1:
        raise ConfigError("sample counts must be >= 1")
    report = validate(barrier, body, n_alpha, n_offset, threads=_threads(args, cfg))
    length = total_length(barrier)
    record = {"command": "validate-barrier", "label": barrier.label,
              "length": length, **report.to_dict(),
              "half_perimeter_check": (jones_length_lower_check(barrier, body)
                                       if report.passed else None)}
    emit(render(record, args.format), args.output)
    return EXIT_OK if report.passed else EXIT_INVALID


BUILTIN_BARRIERS = {
    "circle": lambda gap: circle_barrier(),
    "gapped-circle": lambda gap: circle_barrier(gap=gap),
    "square-boundary": lambda gap: square_boundary_barrier(),
    "jones": lambda gap: jones_square_barrier(),
}


def cmd_make_barrier(args, cfg) -> int:
    gap = float(_opt(args, cfg, "gap", 0.2))
    barrier = BUILTIN_BARRIERS[args.kind](gap)
    if args.output:
        save_barrier(barrier, args.output)
    else:
        sys.stdout.write(json.dumps(barrier_to_dict(barrier), indent=2) + "\n")
    return EXIT_OK


def table_rows(search: bool = False, threads: int = 1, samples: int = 100_000) -> list[dict]:
    sq = square_case_split(SquareParams(), samples=samples)
    disc = (disc_lower_bound(search=True, threads=threads) if search
            else disc_lower_bound())
    return [
        {"shape": "unit square", "perimeter": 4.0,
         "previous_lower": 2.0 + 2e-5,
         "new_lower": 2.0 + sq.final_bound, "gain": sq.final_bound,
         "upper": total_length(jones_square_barrier()),
         "upper_note": "sqrt2 + sqrt6/2 (Steiner tree + half diagonal)",
         "valid": sq.valid},
        {"shape": "unit disc", "perimeter": 2.0 * math.pi,
         "previous_lower": math.pi,
         "new_lower": math.pi + disc.final_bound, "gain": disc.final_bound,
         "upper": None,
         "upper_note": f"n/a (boundary {2.0 * math.pi!r} shipped)",
         "valid": disc.valid},
    ]


def cmd_table(args, cfg) -> int:
    rows = table_rows(bool(_opt(args, cfg, "search", False)), _threads(args, cfg),
                      int(_opt(args, cfg, "samples", 100_000)))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
    elif args.format == "json":
        text = json.dumps(_round({"rows": rows}), indent=2) + "\n"
    else:
        lines = [f"{'shape':<12} {'perimeter':>10} {'previous':>14} "
                 f"{'new lower bound':>18} {'upper bound':>12}"]
        for row in rows:
            upper = f"{row['upper']:.3f}" if row["upper"] is not None else "n/a"
            base = "2" if row["shape"] == "unit square" else "pi"
            lines.append(f"{row['shape']:<12} {row['perimeter']:>10.6g} "
                         f"{row['previous_lower']:>14.8g} "
                         f"{base + ' + ' + format(row['gain'], '.4g'):>18} {upper:>12}")
        text = "\n".join(lines) + "\n"
    emit(text, args.output)
    return EXIT_OK if all(r["valid"] for r in rows) else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument("--threads", type=int, help="worker cap (env OPAQUE_THREADS)")
    common.add_argument("-v", "--verbose", action="store_true")

    disc = argparse.ArgumentParser(add_help=False)
    disc.add_argument("--at", help="evaluate at r,t instead of searching")
    disc.add_argument("--grid", help="coarse grid size n_r,n_t (default 200,200)")
    disc.add_argument("--refine", type=int, help="refinement iterations (default 40)")
    disc.add_argument("--gamma-neighbor", dest="gamma_neighbor",
                      help="gamma for neighboring regions, or 'optimal' (default 0.124)")

    square = argparse.ArgumentParser(add_help=False)
    square.add_argument("--zeta", type=float)
    square.add_argument("--t", type=float)
    square.add_argument("--bout", dest="bout_threshold", type=float)
    square.add_argument("--gamma-neighbor-sq", dest="gamma_neighbor_sq", type=float)
    square.add_argument("--gamma-opposing", dest="gamma_opposing", type=float)
    square.add_argument("--d-neighbor", dest="d_neighbor", type=float)
    square.add_argument("--d-opposing", dest="d_opposing", type=float)
    square.add_argument("--samples", type=int, help="containment samples (default 1e5)")

    p = argparse.ArgumentParser(prog="opaquebound",
                                description="Certified lower bounds for opaque sets.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("disc-bound", parents=[common, disc], help="unit disc bound")
    sp.set_defaults(func=cmd_disc_bound)
    sp = sub.add_parser("square-bound", parents=[common, square], help="unit square bound")
    sp.set_defaults(func=cmd_square_bound)
    sp = sub.add_parser("certify", parents=[common, disc, square], help="both bounds")
    sp.set_defaults(func=cmd_certify)
    sp = sub.add_parser("validate-barrier", parents=[common], help="sampled opacity check")
    sp.add_argument("file")
    sp.add_argument("--body", choices=BODIES)
    sp.add_argument("--n-alpha", dest="n_alpha", type=int)
    sp.add_argument("--n-offset", dest="n_offset", type=int)
    sp.set_defaults(func=cmd_validate_barrier)
    sp = sub.add_parser("make-barrier", parents=[common], help="write a built-in barrier")
    sp.add_argument("kind", choices=sorted(BUILTIN_BARRIERS))
    sp.add_argument("--gap", type=float, help="gap sweep for gapped-circle (default 0.2)")
    sp.set_defaults(func=cmd_make_barrier)
    sp = sub.add_parser("table", parents=[common], help="summary table")
    sp.add_argument("--search", action="store_true", default=None,
                    help="search (r, t) for the disc row instead of the reference point")
    sp.add_argument("--samples", type=int)
    sp.set_defaults(func=cmd_table)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, InfeasibleParameters, VacuousParameters,
            BarrierFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
