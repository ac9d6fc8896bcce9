"""Command-line front end.

Subcommands:

* ``run <config>``            -- single run: metrics CSV + summary
* ``sweep-maps <config>``     -- fleet-size sweep, seed-replicated means
* ``sweep-failure <config>``  -- failure-ratio sweep at a fixed injection time
* ``plot <csv>``              -- SVG line chart of selected CSV columns

Exit codes: 0 success, 1 config/IO error (one-line diagnostic on stderr),
2 usage error.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .outputs import (
    fmt,
    read_csv,
    write_line_svg,
    write_run_outputs,
    write_summary,
)
from .sim import run
from .world import ConfigError, load_config

DEFAULT_REPLICATES = 5


def _build_parser():
    parser = argparse.ArgumentParser(prog="mapflock",
                                     description="Flocking-based aerial coverage simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--trajectories", action="store_true",
                       help="also write a per-step trajectory CSV")

    p_maps = sub.add_parser("sweep-maps", help="coverage/connectivity vs fleet size")
    p_maps.add_argument("config")
    p_maps.add_argument("--counts", type=int, nargs="+", required=True)
    p_maps.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    p_maps.add_argument("--seed", type=int, default=None, help="base replicate seed")
    p_maps.add_argument("--out-dir", default="out")

    p_fail = sub.add_parser("sweep-failure", help="resilience vs failure ratio")
    p_fail.add_argument("config")
    p_fail.add_argument("--fractions", type=float, nargs="+", required=True)
    p_fail.add_argument("--at", type=float, required=True, help="injection time [s]")
    p_fail.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    p_fail.add_argument("--seed", type=int, default=None)
    p_fail.add_argument("--out-dir", default="out")

    p_plot = sub.add_parser("plot", help="render CSV columns as an SVG line chart")
    p_plot.add_argument("csv")
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--cols", default=None,
                        help="comma-separated column names (default: all but t)")
    return parser


def _replicate_seeds(config, args):
    base = config.seed if args.seed is None else args.seed
    return [base + k for k in range(args.replicates)]


def _sweep(points, make_config, label, out_dir):
    """Run replicate seeds per sweep point and write per-run + mean outputs."""
    os.makedirs(out_dir, exist_ok=True)
    lines = []
    for value, seeds in points:
        finals_rc, finals_lam = [], []
        for seed in seeds:
            cfg = make_config(value, seed)
            result = run(cfg)
            run_dir = os.path.join(out_dir, f"{label}_{value:g}", f"seed_{seed}")
            write_run_outputs(result, run_dir)
            finals_rc.append(result.final.coverage_ratio)
            finals_lam.append(result.final.fiedler)
        lines.append(f"{label}_{value:g}.mean_final_coverage_ratio = {fmt(np.mean(finals_rc))}")
        lines.append(f"{label}_{value:g}.mean_final_fiedler = {fmt(np.mean(finals_lam))}")
        lines.append(f"{label}_{value:g}.seeds = {','.join(str(s) for s in seeds)}")
    path = os.path.join(out_dir, "sweep_summary.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _cmd_run(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    result = run(config, record_trajectories=args.trajectories)
    paths = write_run_outputs(result, args.out_dir)
    print(f"final coverage_ratio={fmt(result.final.coverage_ratio)} "
          f"fiedler={fmt(result.final.fiedler)} -> {', '.join(paths)}")
    return 0


def _cmd_sweep_maps(args):
    base = load_config(args.config)
    seeds = _replicate_seeds(base, args)
    points = [(count, seeds) for count in args.counts]
    path = _sweep(points, lambda count, seed: replace(base, map_count=count, seed=seed),
                  "maps", args.out_dir)
    print(f"sweep summary -> {path}")
    return 0


def _cmd_sweep_failure(args):
    base = load_config(args.config)
    seeds = _replicate_seeds(base, args)
    points = [(frac, seeds) for frac in args.fractions]
    path = _sweep(points,
                  lambda frac, seed: replace(base, seed=seed,
                                             failures=((args.at, frac),)),
                  "failure", args.out_dir)
    print(f"sweep summary -> {path}")
    return 0


def _cmd_plot(args):
    names, cols = read_csv(args.csv)
    if args.cols:
        wanted = [c.strip() for c in args.cols.split(",")]
        missing = [c for c in wanted if c not in cols]
        if missing:
            raise ConfigError(f"unknown columns: {', '.join(missing)}")
    else:
        wanted = [n for n in names if n != names[0]]
    x = cols[names[0]]
    write_line_svg(args.out, x, {name: cols[name] for name in wanted},
                   x_label=names[0])
    print(f"plot -> {args.out}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep-maps": _cmd_sweep_maps,
    "sweep-failure": _cmd_sweep_failure,
    "plot": _cmd_plot,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
