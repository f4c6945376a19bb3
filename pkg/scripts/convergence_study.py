"""Grid-refinement study against the two exact solutions.

Traveling wave: constant kernel delta=0.5, sine data, L1 error at t=1.
Local ramp: beta=0.5, L1 error of cell averages at t=2 (after the shock).

    python scripts/convergence_study.py --cells 250 500 1000 2000 4000
"""
import argparse
import csv
import sys

import numpy as np

from nonlocal_lwr import DensityField, KernelSpec, PeriodicGrid, SolverConfig, run
from nonlocal_lwr.experiments import build_initial
from nonlocal_lwr.oracles import LocalLinearSolution, traveling_wave_exact


def traveling_wave_error(n, t=1.0):
    grid = PeriodicGrid(n)
    rho0 = build_initial("sine", grid)
    final = run(SolverConfig(grid, t, KernelSpec.constant(0.5)), rho0).final
    return float(np.sum(np.abs(final.values - traveling_wave_exact(rho0, 0.5, t).values)) * grid.dx)


def local_ramp_error(n, t=2.0):
    grid = PeriodicGrid(n)
    sol = LocalLinearSolution(0.5)
    final = run(SolverConfig(grid, t), DensityField(grid, sol.cell_averages(grid, 0.0))).final
    return float(np.sum(np.abs(final.values - sol.cell_averages(grid, t))) * grid.dx)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--cells", type=int, nargs="+", default=[250, 500, 1000, 2000, 4000])
    args = parser.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("case", "n_cells", "dx", "l1_error", "observed_order"))
    for case, fn in (("traveling_wave", traveling_wave_error), ("local_ramp", local_ramp_error)):
        prev = None
        for n in sorted(args.cells):
            err = fn(n)
            order = "" if prev is None else f"{np.log2(prev / err):.3f}"
            writer.writerow((case, n, f"{1 / n:.3e}", f"{err:.6e}", order))
            prev = err


if __name__ == "__main__":
    main()
