"""Command-line entry point: ``nfhmimo {nmse,eigen,capacity,dump}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(including sweeps where any point failed).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import runner
from .config import load_config
from .errors import ConfigError, HMIMOError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, type=Path, help="experiment config file")
    p.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    p.add_argument("--quad-order", type=int, help="Gauss-Legendre points per axis")
    p.add_argument("--seed", type=int, help="random seed (unsigned 64-bit)")
    p.add_argument("--workers", type=int, help="threads for independent sweep points")
    p.add_argument("--no-plots", action="store_true", help="skip PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfhmimo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("nmse", "NMSE of closed-form models against the quadrature oracle"),
                        ("eigen", "singular-value spectra per model"),
                        ("capacity", "exact capacity and upper bounds")):
        _common(sub.add_parser(name, help=help_))
    dump = sub.add_parser("dump", help="write one channel matrix (CSV + binary)")
    _common(dump)
    dump.add_argument("--model", default="CDCM", help="Exact, CDCM or CICM")
    return parser


def _apply_overrides(cfg, args):
    kw = {}
    if args.out is not None:
        kw["output_dir"] = args.out
    if args.quad_order is not None:
        if args.quad_order < 2:
            raise ConfigError("--quad-order must be >= 2")
        kw["quad_order"] = args.quad_order
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("--seed must fit in an unsigned 64-bit integer")
        kw["seed"] = args.seed
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        kw["workers"] = args.workers
    return cfg.with_overrides(**kw) if kw else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "dump":
            from .channel import Model
            try:
                model = Model.parse(args.model)
            except ValueError as err:
                raise ConfigError(str(err)) from None
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    plot = not args.no_plots
    try:
        if args.command == "nmse":
            result = runner.run_nmse_sweep(cfg, plot=plot)
        elif args.command == "eigen":
            result = runner.run_eigen(cfg, plot=plot)
        elif args.command == "capacity":
            result = runner.run_capacity_sweep(cfg, plot=plot)
        else:
            result = runner.dump_channel(cfg, model)
    except HMIMOError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC

    print(result.csv_path)
    for extra in (result.figure_path, result.meta_path, *result.extra_paths):
        if extra is not None:
            print(extra)
    if result.n_errors:
        print(f"{result.n_errors} row(s) recorded errors", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
