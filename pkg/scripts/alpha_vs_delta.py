"""Stability constant and guaranteed decay rate as functions of the horizon.

Prints alpha, nu, nu*alpha and the tail bound for the linear kernel (and an
optional tabulated profile) over a range of delta values.

    python scripts/alpha_vs_delta.py --deltas 0.05 0.1 0.2 0.5 1.0
"""
import argparse
import csv
import sys

import numpy as np

from nonlocal_lwr import KernelSpec, compute_moments, stability_constant


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--deltas", type=float, nargs="+", default=list(np.round(np.linspace(0.05, 1.0, 20), 4)))
    parser.add_argument("--kmax", type=int, default=256)
    parser.add_argument("--samples", help="comma-separated tabulated profile to study as well")
    args = parser.parse_args()

    shapes = {"linear": lambda d: KernelSpec.linear(d), "constant": lambda d: KernelSpec.constant(d)}
    if args.samples:
        values = [float(v) for v in args.samples.split(",")]
        shapes["tabulated"] = lambda d: KernelSpec.tabulated(values, d)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("shape", "delta", "nu", "alpha", "argmin_k", "nu_alpha", "tail_bound"))
    for name, make in shapes.items():
        for delta in args.deltas:
            spec = make(delta)
            m = compute_moments(spec)
            rep = stability_constant(spec, args.kmax, m)
            writer.writerow((name, delta, f"{m.nu:.6g}", f"{rep.alpha:.6g}", rep.argmin_k,
                             f"{m.nu * rep.alpha:.6g}", f"{rep.tail_bound:.6g}"))


if __name__ == "__main__":
    main()
