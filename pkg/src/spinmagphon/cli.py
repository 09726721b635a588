"""Command line entry point.

Subcommands: ``fig2 | fig3 | fig4 | sweep | derive | selftest``.
Exit codes: 0 success, 1 usage error, 2 configuration error, 3 more than 10%
of sweep points failed.  ``SPINMAGPHON_WORKERS`` sets the default worker
count; ``--workers`` overrides it.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .constants import ConstantsError
from .tables import TableError
from .sweep import (
    ConfigError,
    GridFailure,
    RunConfig,
    emit_tables,
    fig2_tables,
    fig3_tables,
    fig4_tables,
    parse_config,
    sweep_table,
)

TWO_PI = 2.0 * math.pi


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="spinmagphon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--workers", type=int, default=None, help="worker pool size")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        p.add_argument("--json", action="store_true", help="also write JSON mirrors")

    for name, doc in (
        ("fig2", "parameter maps: enhancement, coupling ratios, contour grids"),
        ("fig3", "population dynamics trajectories"),
        ("fig4", "tripartite entanglement trajectories"),
        ("sweep", "custom derived-parameter grid"),
    ):
        common(sub.add_parser(name, help=doc))
    p_derive = sub.add_parser("derive", help="print a derived-parameter report")
    p_derive.add_argument("--config", help="run configuration file")
    sub.add_parser("selftest", help="run the quick oracle/invariant checks")
    return parser


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if getattr(args, "config", None) else RunConfig()
    env_workers = os.environ.get("SPINMAGPHON_WORKERS")
    if env_workers is not None:
        try:
            cfg.workers = int(env_workers)
        except ValueError as exc:
            raise ConfigError(f"SPINMAGPHON_WORKERS must be an integer: {env_workers!r}") from exc
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg.workers = args.workers
    cfg.force = bool(getattr(args, "force", False))
    cfg.json_mirror = bool(getattr(args, "json", False))
    return cfg


def _cmd_figure(args, builder) -> int:
    cfg = _load_config(args)
    tables, errors = builder(cfg)
    written = emit_tables(tables, errors, args.out, force=cfg.force, json_mirror=cfg.json_mirror)
    for path in written:
        print(path)
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    table, errors = sweep_table(cfg)
    written = emit_tables([table], errors, args.out, force=cfg.force, json_mirror=cfg.json_mirror)
    for path in written:
        print(path)
    return 0


def _cmd_derive(args) -> int:
    from .model import derive_params
    cfg = _load_config(args)
    dp = derive_params(cfg.physical(), cfg.constants())
    rows = [
        ("effective mass M", f"{dp.M:.6e} kg"),
        ("magnet volume V", f"{dp.V:.6e} m^3"),
        ("distance r0", f"{dp.r0 * 1e9:.3f} nm"),
        ("zero-point fluctuation z_zpf", f"{dp.z_zpf:.6e} m"),
        ("bare coupling lambda/2pi", f"{dp.lam / TWO_PI:.6e} Hz"),
        ("exchange coupling g0/2pi", f"{dp.g0 / TWO_PI:.6e} Hz"),
        ("g0 / lambda", f"{dp.g0 / dp.lam:.4f}"),
        ("drive amplitude Omega_p/2pi", f"{dp.Omega_p / TWO_PI:.6e} Hz"),
        ("squeezing parameter r", f"{dp.r:.6f}"),
        ("squeezed detuning Delta_m/2pi", f"{dp.Delta_m / TWO_PI:.6e} Hz"),
        ("enhanced coupling lambda_eff/2pi", f"{dp.lambda_eff / TWO_PI:.6e} Hz"),
        ("thermal decay gamma_th/2pi", f"{dp.gamma_th / TWO_PI:.6e} Hz"),
        ("effective mechanical decay Gamma_m/2pi", f"{dp.Gamma_m / TWO_PI:.6e} Hz"),
        ("cooperativity C", f"{dp.C:.6e}"),
    ]
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"{label:<{width}}  {value}")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest
    return 0 if run_selftest() else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "fig2":
            return _cmd_figure(args, fig2_tables)
        if args.command == "fig3":
            return _cmd_figure(args, fig3_tables)
        if args.command == "fig4":
            return _cmd_figure(args, fig4_tables)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "derive":
            return _cmd_derive(args)
        if args.command == "selftest":
            return _cmd_selftest(args)
    except (ConfigError, ConstantsError, TableError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GridFailure as exc:
        print(f"grid failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
