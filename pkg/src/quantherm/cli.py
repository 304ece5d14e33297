"""Command-line driver: simulate, sweep, plotdata.

Exit codes: 0 success, 2 configuration error, 3 numerical abort.
Progress goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    PRESETS,
    SWEEP_PRESETS,
    ConfigError,
    parse_run_config,
    parse_sweep_config,
)
from .io import write_report_json, write_sweep_csv, write_trajectory_csv, read_trajectory_csv
from .numerics import NumericsError
from .pipeline import run_single, run_sweep

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _load_text(source: str, presets: dict) -> tuple[str, str]:
    """Resolve a preset name or config path to (text, stem)."""
    if source in presets:
        return presets[source], source
    path = Path(source)
    if not path.is_file():
        raise ConfigError(
            f"{source!r} is neither a preset ({', '.join(presets)}) nor a config file"
        )
    return path.read_text(), path.stem


def _cmd_simulate(args) -> int:
    text, stem = _load_text(args.config, PRESETS)
    config = parse_run_config(text)
    if args.stride is not None:
        from dataclasses import replace

        config = replace(config, stride=args.stride)
    if args.verify_step:
        from dataclasses import replace

        config = replace(config, verify_step=True)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"running {config.system} simulation ({stem}), {config.n_steps} steps")
    result = run_single(config)
    csv_path = out_dir / f"{stem}_trajectory.csv"
    json_path = out_dir / f"{stem}_report.json"
    write_trajectory_csv(csv_path, result)
    write_report_json(json_path, result)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def _cmd_sweep(args) -> int:
    text, stem = _load_text(args.config, SWEEP_PRESETS)
    sweep = parse_sweep_config(text)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    print(f"running sweep over {sweep.sweep_key} ({len(sweep.values)} values)")
    results = run_sweep(sweep, workers=args.workers)
    csv_path = out_dir / f"{stem}_sweep.csv"
    write_sweep_csv(csv_path, sweep, results)
    print(f"wrote {csv_path}")
    return 0


def _cmd_plotdata(args) -> int:
    from .plotting import emit_plot_data

    path = Path(args.trajectory)
    if not path.is_file():
        raise ConfigError(f"trajectory file {args.trajectory!r} not found")
    columns = read_trajectory_csv(path)
    names = [q.strip() for q in args.quantity.split(",") if q.strip()] if args.quantity else None
    out_dir = Path(args.out) if args.out else path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        paths = emit_plot_data(columns, out_dir, path.stem, names)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from exc
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quantherm",
        description=(
            "Exact nonequilibrium thermodynamics of a damped cavity mode and a "
            "two-level atom coupled to a bosonic reservoir (hbar = k = omega_s = 1)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configured simulation")
    sim.add_argument("config", help=f"preset name ({', '.join(PRESETS)}) or config path")
    sim.add_argument("--out", default=".", help="output directory")
    sim.add_argument("--stride", type=int, default=None, help="output stride override")
    sim.add_argument("--verify-step", action="store_true", help="report an h/2 re-solve error estimate")
    sim.set_defaults(func=_cmd_simulate)

    swp = sub.add_parser("sweep", help="run a parameter sweep")
    swp.add_argument("config", help=f"sweep preset ({', '.join(SWEEP_PRESETS)}) or config path")
    swp.add_argument("--out", default=".", help="output directory")
    swp.add_argument("--workers", type=int, default=None, help="parallel worker count")
    swp.set_defaults(func=_cmd_sweep)

    pd = sub.add_parser("plotdata", help="export plot-ready series and figures from a trajectory CSV")
    pd.add_argument("trajectory", help="trajectory CSV produced by simulate")
    pd.add_argument("--quantity", default=None, help="comma-separated quantity names (default: all)")
    pd.add_argument("--out", default=None, help="output directory (default: alongside the CSV)")
    pd.set_defaults(func=_cmd_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
