"""Command line entry point: simulate, sweep, spectral, verify, presets."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from .exceptions import ConfigError
from .experiments import PRESETS, load_config, preset, run_experiment, sweep
from .kernels import KernelSpec, compute_moments
from .spectral import stability_constant

log = logging.getLogger("nonlocal_lwr")

SPECTRAL_COLUMNS = ("k", "b", "c", "re_eig", "im_eig", "two_pi_k_b")


def _resolve_config(target, fast, output):
    if target in PRESETS:
        cfg = preset(target, fast=fast)
    else:
        cfg = load_config(target, fast=fast)
    if output:
        cfg.output_dir = output
    elif cfg.output_dir == "runs":
        cfg.output_dir = str(Path("runs") / cfg.name)
    return cfg


def cmd_simulate(args):
    cfg = _resolve_config(args.config, args.fast, args.out)
    t0 = time.perf_counter()
    status = run_experiment(cfg)
    with open(Path(cfg.output_dir) / "meta.json") as fh:
        meta = json.load(fh)
    if status == 0:
        fit = meta["rate_fit"]
        print(f"{cfg.name}: {meta['steps']} steps in {time.perf_counter() - t0:.1f}s -> {cfg.output_dir}")
        print(f"  fit {fit['kind']}: rate={fit['rate']} r2={fit['r_squared']} "
              f"lambda_bound={fit['lambda_bound']} stagnated={fit['stagnated']}")
    else:
        print(f"{cfg.name}: FAILED ({meta.get('error')})", file=sys.stderr)
    return status


def cmd_sweep(args):
    directory = Path(args.config_dir)
    files = sorted(p for p in directory.iterdir() if p.suffix in (".json", ".yaml", ".yml"))
    configs = [load_config(p, fast=args.fast) for p in files]
    out = Path(args.out or directory / "runs")
    rows = sweep(configs, out, workers=args.workers)
    for row in rows:
        print(", ".join(f"{k}={row[k]}" for k in ("name", "model", "alpha", "rate", "stagnated", "status")))
    print(f"summary -> {out / 'summary.csv'}")
    return 0 if all(r["status"] == "ok" for r in rows) else 1


def _kernel_from_args(args):
    if args.kernel == "tabulated":
        if not args.samples:
            raise ConfigError("--samples is required for a tabulated kernel")
        return KernelSpec.tabulated([float(v) for v in args.samples.split(",")], args.delta)
    return KernelSpec(args.delta, args.kernel)


def cmd_spectral(args):
    spec = _kernel_from_args(args)
    moments = compute_moments(spec)
    report = stability_constant(spec, args.kmax, moments)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "spectral.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPECTRAL_COLUMNS)
        for k, b, c, lam, g in zip(report.k, report.b, report.c, report.eigenvalues, report.two_pi_k_b):
            writer.writerow((int(k), repr(float(b)), repr(float(c)), repr(float(lam.real)),
                             repr(float(lam.imag)), repr(float(g))))
    side = {"kernel": spec.to_dict(), "k_max": report.k_max, "nu": moments.nu, "alpha": report.alpha,
            "alpha_argmin_k": report.argmin_k, "tail_bound": report.tail_bound,
            "tail_certified": report.tail_certified, "satisfies_A3": spec.satisfies_A3}
    with open(out / "spectral.json", "w") as fh:
        json.dump(side, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"alpha = {report.alpha:.10g} (k = {report.argmin_k}), tail bound = {report.tail_bound:.10g}, "
          f"nu = {moments.nu:.10g}")
    return 0


def cmd_verify(args):
    from .verify import run_verification
    rows = run_verification(seed=args.seed, n_polys=args.n)
    width = max(len(r.name) for r in rows)
    print(f"{'check':<{width}}  cases  fails  {'min margin':>13}  {'lhs':>13}  {'rhs':>13}  result")
    for r in rows:
        print(f"{r.name:<{width}}  {r.cases:5d}  {r.failures:5d}  {r.min_margin:13.6e}  {r.lhs:13.6e}  "
              f"{r.rhs:13.6e}  {'PASS' if r.failures == 0 else 'FAIL'}")
    return 0 if all(r.failures == 0 for r in rows) else 1


def cmd_presets(args):
    for name in sorted(PRESETS):
        print(f"{name:24s} {PRESETS[name]['description']}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="nonlocal-lwr", description=__doc__)
    parser.add_argument("--fast", action="store_true", help="use a 1000-cell grid instead of the configured one")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment from a config file or preset name")
    p.add_argument("config", help="YAML/JSON config file, or a preset name (see `presets`)")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run every config in a directory in parallel")
    p.add_argument("config_dir")
    p.add_argument("--out", help="root directory for per-run outputs and summary.csv")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectral", help="Fourier symbols and stability constant of a kernel")
    p.add_argument("--kernel", choices=("constant", "linear", "tabulated"), default="linear")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--kmax", type=int, default=256)
    p.add_argument("--samples", help="comma-separated samples for --kernel tabulated")
    p.add_argument("--out", default="spectral_out")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("verify", help="randomized checks of the functional inequalities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-n", type=int, default=100, help="random trig polynomials per check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presets", help="list built-in experiment presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    # allow --fast after the subcommand as well
    argv = list(sys.argv[1:] if argv is None else argv)
    fast = "--fast" in argv
    argv = [a for a in argv if a != "--fast"]
    args = build_parser().parse_args(argv)
    args.fast = args.fast or fast
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
