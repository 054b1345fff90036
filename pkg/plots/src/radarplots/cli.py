"""Command line entry: plots --pd-csv PATH --cdf-csv PATH --out DIR."""

import argparse
import sys

from .errors import PlotError
from .render import PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render sweep summary and phase-error CDF CSVs into "
                    "three SVG panels.")
    parser.add_argument("--pd-csv", required=True,
                        help="summary CSV (p, method, mean_pd, "
                             "mean_sinr_db, trial_count)")
    parser.add_argument("--cdf-csv", required=True,
                        help="pooled CDF CSV (p, method, e_deg, cdf)")
    parser.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(pd_csv=args.pd_csv, cdf_csv=args.cdf_csv, out_dir=args.out)
    try:
        paths = render(job)
    except (OSError, PlotError) as exc:
        print(f"plots: {exc}", file=sys.stderr)
        return 1
    for panel in ("pd", "sinr", "cdf"):
        print(f"{panel}: {paths[panel]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
