"""boplots render <kind> <csv> <out.png>"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="boplots",
                                description="regenerate figures from bolax CSVs")
    sub = p.add_subparsers(dest="command", required=True)
    rp = sub.add_parser("render", help="render one figure")
    rp.add_argument("kind", choices=KINDS)
    rp.add_argument("csv")
    rp.add_argument("out")
    args = p.parse_args(argv)
    try:
        summary = render(FigureSpec(kind=args.kind, csv_path=args.csv,
                                    out_path=args.out))
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out} ({summary['points']} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
