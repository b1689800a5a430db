"""Command-line interface.

    extunnel list
    extunnel simulate <builtin|config.yaml> [--out DIR] [--routes R [R ...]]
                      [--workers N] [--dump-state T_FS [T_FS ...]]
    extunnel scan-transmission <builtin|config.yaml> [--out DIR]
    extunnel sweep-phase-space <builtin|config.yaml> [--out DIR]
    extunnel validate <builtin|config.yaml>

Exit codes: 0 success, 2 configuration error, 3 numerical-precondition
error (guard bands, unfinished interaction, degenerate states, ...).
"""

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import SimulationError
from .runner import builtin_names, load_builtin, load_config, run, validate


def _resolve_config(token: str):
    if token in builtin_names():
        return load_builtin(token)
    path = Path(token)
    if path.exists():
        return load_config(path)
    raise ValueError(
        f"{token!r} is neither a builtin ({', '.join(builtin_names())}) "
        "nor a config file")


def _cmd_list(_args):
    for name in builtin_names():
        print(name)
    return 0


def _cmd_simulate(args):
    cfg = _resolve_config(args.scenario)
    csv_path, meta_path, rows = run(
        cfg, args.out, routes=args.routes or None,
        workers=args.workers, dump_state=args.dump_state or ())
    print(f"{cfg.name}: {len(rows)} rows -> {csv_path}")
    print(f"metadata -> {meta_path}")
    return 0


def _cmd_scan(args):
    cfg = _resolve_config(args.scenario)
    if cfg.kind != "scan":
        raise ValueError(f"{cfg.name} is a {cfg.kind} scenario, not a scan")
    return _cmd_simulate(args)


def _cmd_phase(args):
    cfg = _resolve_config(args.scenario)
    if cfg.kind != "phase_sweep":
        raise ValueError(f"{cfg.name} is a {cfg.kind} scenario, not a phase sweep")
    return _cmd_simulate(args)


def _cmd_validate(args):
    cfg = _resolve_config(args.scenario)
    problems = validate(cfg) if cfg.kind == "two_particle" else []
    if problems:
        for p in problems:
            print(f"FAIL: {p}")
        return 2
    print(f"{cfg.name}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extunnel",
        description="Tunneling probabilities for identical-particle wave packets")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list builtin scenarios").set_defaults(fn=_cmd_list)

    def add_run_args(p):
        p.add_argument("scenario", help="builtin name or YAML config path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--routes", nargs="+", metavar="ROUTE",
                       help="override the routes of the scenario")
        p.add_argument("--workers", type=int, default=1,
                       help="concurrent sweep points")
        p.add_argument("--dump-state", nargs="+", type=float, metavar="T_FS",
                       help="write binary field snapshots near these times")

    p_sim = sub.add_parser("simulate", help="run a scenario and emit CSV")
    add_run_args(p_sim)
    p_sim.set_defaults(fn=_cmd_simulate)

    p_scan = sub.add_parser("scan-transmission",
                            help="transfer-matrix T/R scan to CSV")
    add_run_args(p_scan)
    p_scan.set_defaults(fn=_cmd_scan)

    p_phase = sub.add_parser("sweep-phase-space",
                             help="N-particle phase-space-density sweep to CSV")
    add_run_args(p_phase)
    p_phase.set_defaults(fn=_cmd_phase)

    p_val = sub.add_parser("validate", help="check a scenario without running it")
    p_val.add_argument("scenario")
    p_val.set_defaults(fn=_cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
