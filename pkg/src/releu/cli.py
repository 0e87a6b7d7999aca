"""Command-line front end.

Four subcommands drive the package end to end:

    init      write the initial snapshot and the data-validation report
    run       evolve the configured setup, writing snapshots + monitor log
    diagnose  norm/energy/vorticity/monitor rows from a snapshot series
    verify    execute the numbered verification checks

Exit codes: 0 success; 1 configuration problem; 2 I/O problem (missing or
malformed files); 3 the evolution aborted numerically; 4 a verification
check failed. Reports are plain CSV; snapshots are the flat binary format
of snapshot_io.
"""

from __future__ import annotations

import argparse
import glob
import sys
from pathlib import Path

from .config import ConfigError, SimConfig, load_config, parse_config
from .driver import diagnose_series, init_output, run_simulation, write_csv
from .eos import Eos
from .grid import Grid
from .integrator import NumericalAbort
from .snapshot_io import SnapshotFormatError, read_series
from .verification import SUITES, run_suite

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_ABORT = 3
EXIT_VERIFY = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="releu",
        description="Lagrangian free-boundary relativistic-Euler laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument(
            "--config",
            metavar="PATH",
            default=None,
            help="INI configuration file (omit to use built-in defaults)",
        )

    p_init = sub.add_parser(
        "init", help="write the initial snapshot and data-validation report"
    )
    add_config(p_init)
    p_init.add_argument("--out", metavar="DIR", default="out")

    p_run = sub.add_parser(
        "run", help="evolve to t_end, writing snapshots and the monitor log"
    )
    add_config(p_run)
    p_run.add_argument("--out", metavar="DIR", default="out")

    p_diag = sub.add_parser(
        "diagnose", help="compute diagnostic rows from a snapshot series"
    )
    add_config(p_diag)
    p_diag.add_argument(
        "--snapshots",
        metavar="GLOB",
        required=True,
        help="snapshot files forming one uniformly spaced series",
    )
    p_diag.add_argument(
        "--out",
        metavar="DIR",
        default=None,
        help="report directory (default: the configured report_path)",
    )

    p_verify = sub.add_parser(
        "verify", help="run the numbered verification checks"
    )
    p_verify.add_argument(
        "--suite",
        choices=sorted(SUITES),
        default="all",
    )
    p_verify.add_argument("--seed", type=int, default=0)

    return parser


def _load(args) -> SimConfig:
    if args.config is None:
        return parse_config("")
    return load_config(args.config)


def cmd_init(args) -> int:
    cfg = _load(args)
    path = init_output(cfg, args.out)
    print(f"wrote {path} and {Path(args.out) / 'data_report.csv'}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load(args)
    result = run_simulation(cfg, args.out)
    print(
        f"wrote {len(result.snapshot_paths)} snapshots (dt = {result.dt:.6g}) "
        f"and {Path(args.out) / 'monitors.csv'}"
    )
    return EXIT_OK


def cmd_diagnose(args) -> int:
    cfg = _load(args)
    files = sorted(glob.glob(args.snapshots))
    if not files:
        print(f"no snapshots match {args.snapshots!r}", file=sys.stderr)
        return EXIT_IO
    snaps = read_series(files)
    grid = Grid(cfg.grid.n1, cfg.grid.n2, cfg.grid.n3)
    if snaps[0].shape != grid.shape:
        print(
            f"snapshot grid {snaps[0].shape} does not match configured grid "
            f"{grid.shape}",
            file=sys.stderr,
        )
        return EXIT_IO
    eos = Eos(cfg.eos.gamma)
    try:
        header, rows = diagnose_series(
            grid, eos, snaps, p_max=cfg.diagnostics.p_max
        )
    except ValueError as exc:  # series too short for the stack window
        print(f"snapshot series: {exc}", file=sys.stderr)
        return EXIT_IO
    out = Path(args.out if args.out is not None else cfg.diagnostics.report_path)
    out.mkdir(parents=True, exist_ok=True)
    report = out / "diagnostics.csv"
    write_csv(report, header, rows)
    print(f"wrote {len(rows)} diagnostic rows to {report}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    for r in results:
        print(r.line())
    failed = [r.number for r in results if not r.passed]
    if failed:
        print(f"suite '{args.suite}': {len(failed)} of {len(results)} checks "
              f"failed: {failed}")
        return EXIT_VERIFY
    print(f"suite '{args.suite}': all {len(results)} checks passed")
    return EXIT_OK


_COMMANDS = {
    "init": cmd_init,
    "run": cmd_run,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        for line in exc.violations:
            print(f"config: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except SnapshotFormatError as exc:
        print(f"snapshot: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"i/o: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalAbort as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
