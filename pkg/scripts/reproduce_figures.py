"""Run every built-in preset and print the summary table.

    python scripts/reproduce_figures.py --out runs/presets [--fast] [--workers 4]

Per-run artifacts (diagnostics.csv, snapshot_t*.csv, meta.json) land in
<out>/<preset>/, the table in <out>/summary.csv.
"""
import argparse
import csv
import sys
from pathlib import Path

from nonlocal_lwr.experiments import PRESETS, SUMMARY_COLUMNS, preset, sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="runs/presets")
    parser.add_argument("--fast", action="store_true", help="1000-cell grids")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--only", nargs="*", choices=sorted(PRESETS), help="subset of presets")
    args = parser.parse_args()

    names = args.only or sorted(PRESETS)
    rows = sweep([preset(n, fast=args.fast) for n in names], Path(args.out), workers=args.workers)
    writer = csv.DictWriter(sys.stdout, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return 0 if all(r["status"] == "ok" for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
