"""Script entry point: render profile panels and/or an IV curve.

    etsim-plots --profiles run/profiles_t0.csv run/profiles_t100.csv \
                --lattice run/lattice.csv --out profiles.png
    etsim-plots --iv sweep/iv.csv --out iv.svg
"""

from __future__ import annotations

import argparse
import sys

from .plots import PlotSpec, SchemaError, plot_iv, plot_profiles


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etsim-plots",
                                     description="plots from simulator CSV output")
    parser.add_argument("--profiles", nargs="+", metavar="CSV",
                        help="profile snapshot CSVs (x,n,theta,V)")
    parser.add_argument("--lattice", metavar="CSV",
                        help="lattice CSV (x,theta_L) overlaid on the temperature panel")
    parser.add_argument("--iv", metavar="CSV", help="IV sweep CSV")
    parser.add_argument("--out", required=True,
                        help="output image path (.png or .svg)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if bool(args.profiles) == bool(args.iv):
        print("usage error: give exactly one of --profiles or --iv", file=sys.stderr)
        return 1
    try:
        if args.profiles:
            out = plot_profiles(PlotSpec(profile_csvs=args.profiles,
                                         lattice_csv=args.lattice,
                                         out_path=args.out))
        else:
            out = plot_iv(args.iv, args.out)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
