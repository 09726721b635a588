"""``figrender render --figure <id> --in <csv...> --out <png>``.

Exits 0 on success, 2 on a contract violation (missing/corrupted metadata,
wrong columns), 1 on usage errors.  No partial output file is left behind on
failure.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_IDS, PlotSpec, render
from .tables import ContractError


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def main(argv=None) -> int:
    parser = _Parser(prog="figrender", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render result tables to a PNG")
    p.add_argument("--figure", required=True, choices=FIGURE_IDS)
    p.add_argument("--in", dest="inputs", required=True, nargs="+", help="input CSV table(s)")
    p.add_argument("--out", required=True, help="output PNG path")
    p.add_argument("--level", type=float, action="append", default=None,
                   help="override contour level(s) for map figures")
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    spec = PlotSpec(
        figure=args.figure,
        inputs=list(args.inputs),
        output=args.out,
        contour_levels=args.level or [],
    )
    try:
        report = render(spec)
    except ContractError as exc:
        print(f"contract violation:\n{exc}", file=sys.stderr)
        return 2
    print(report.output)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
