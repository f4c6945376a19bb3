"""Declarative experiment configs, initial-data scenarios, presets and sweeps."""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import diagnostics as diag
from .exceptions import ConfigError, FitError, PreconditionError
from .field import DensityField, PeriodicGrid
from .kernels import KernelSpec, compute_moments
from .oracles import LocalLinearSolution, traveling_wave_exact
from .solver import SolverConfig, run
from .spectral import stability_constant

log = logging.getLogger(__name__)

DEFAULT_CELLS = 5000
FAST_CELLS = 1000

_ALIASES = {
    "bellshape": "bell", "bell": "bell",
    "sinewave": "sine", "sine": "sine",
    "linearramp": "linear", "linear": "linear", "ramp": "linear",
    "piecewiseconstant": "piecewise", "piecewise": "piecewise",
    "compactsupport": "compact", "compact": "compact",
    "custom": "custom",
}


@dataclass(frozen=True)
class Scenario:
    """Initial density on the ring.

    bell       0.4 + 0.6 exp(-100 (x - 0.5)^2)
    sine       0.5 + 0.4 sin(4 pi x)
    linear     beta x
    piecewise  0.25 on [0, 0.5), 0.75 on [0.5, 1)
    compact    height * exp(-1 / (1 - ((x - center)/radius)^2)) on |x - center| < radius, else 0
    custom     CSV file with columns x, rho, interpolated periodically
    """

    kind: str
    beta: float = 0.5
    center: float = 0.5
    radius: float = 0.15
    height: float = 0.8
    file: Optional[str] = None

    def __post_init__(self):
        key = str(self.kind).replace("_", "").replace("-", "").lower()
        if key not in _ALIASES:
            raise ConfigError(f"unknown scenario {self.kind!r}")
        object.__setattr__(self, "kind", _ALIASES[key])
        if self.kind == "linear" and not 0 <= self.beta <= 1:
            raise ConfigError("linear ramp needs beta in [0, 1]")
        if self.kind == "compact" and not (0 < self.radius <= 0.5 and 0 < self.height <= 1):
            raise ConfigError("compact bump needs 0 < radius <= 0.5 and 0 < height <= 1")
        if self.kind == "custom" and not self.file:
            raise ConfigError("custom scenario needs a file")

    @classmethod
    def from_value(cls, value):
        if isinstance(value, Scenario):
            return value
        if isinstance(value, str):
            return cls(value)
        if isinstance(value, dict):
            d = dict(value)
            kind = d.pop("type", None) or d.pop("kind", None)
            if kind is None:
                raise ConfigError("scenario needs a 'type'")
            unknown = set(d) - {"beta", "center", "radius", "height", "file"}
            if unknown:
                raise ConfigError(f"unknown scenario keys {sorted(unknown)}")
            return cls(kind, **d)
        raise ConfigError(f"cannot read scenario from {value!r}")

    def to_dict(self):
        d = {"type": self.kind}
        if self.kind == "linear":
            d["beta"] = self.beta
        elif self.kind == "compact":
            d.update(center=self.center, radius=self.radius, height=self.height)
        elif self.kind == "custom":
            d["file"] = self.file
        return d

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "bell":
            return 0.4 + 0.6 * np.exp(-100 * (x - 0.5) ** 2)
        if self.kind == "sine":
            return 0.5 + 0.4 * np.sin(4 * np.pi * x)
        if self.kind == "linear":
            return self.beta * x
        if self.kind == "piecewise":
            return np.where(x < 0.5, 0.25, 0.75)
        if self.kind == "compact":
            z = (x - self.center) / self.radius
            inside = np.abs(z) < 1
            out = np.zeros_like(x)
            out[inside] = self.height * np.exp(-1.0 / (1.0 - z[inside] ** 2))
            return out
        data = np.loadtxt(self.file, delimiter=",", skiprows=1, ndmin=2)
        xs, rho = data[:, 0], data[:, 1]
        return np.interp(np.mod(x, 1.0), xs, rho, period=1.0)


def build_initial(scenario, grid: PeriodicGrid) -> DensityField:
    """Cell-centred sampling of the scenario's initial density."""
    return DensityField.from_function(grid, Scenario.from_value(scenario).profile)


@dataclass
class ExperimentConfig:
    name: str
    scenario: Scenario
    kernel: Optional[KernelSpec] = None
    n_cells: int = DEFAULT_CELLS
    t_end: float = 5.0
    cfl: float = 0.5
    diagnostic_interval: float = 0.01
    snapshot_times: tuple = ()
    fit_kind: Optional[str] = None
    fit_window: Optional[tuple] = None
    output_dir: str = "runs"
    seed: int = 0
    description: str = ""

    @property
    def model(self):
        return "local" if self.kernel is None else "nonlocal"

    def solver_config(self):
        return SolverConfig(grid=PeriodicGrid(self.n_cells), t_end=self.t_end, kernel=self.kernel, cfl=self.cfl,
                            snapshot_times=self.snapshot_times, diagnostic_interval=self.diagnostic_interval)

    def to_dict(self):
        return {
            "name": self.name,
            "scenario": self.scenario.to_dict(),
            "model": self.model,
            "kernel": None if self.kernel is None else self.kernel.to_dict(),
            "n_cells": self.n_cells,
            "t_end": self.t_end,
            "cfl": self.cfl,
            "diagnostic_interval": self.diagnostic_interval,
            "snapshot_times": list(self.snapshot_times),
            "fit": {"kind": self.resolved_fit_kind,
                    "window": None if self.fit_window is None else list(self.fit_window)},
            "output_dir": self.output_dir,
            "seed": self.seed,
            "description": self.description,
        }

    @property
    def resolved_fit_kind(self):
        return self.fit_kind or ("linear" if self.kernel is None else "exponential")

    @classmethod
    def from_dict(cls, d, fast=False):
        d = dict(d)
        base = {}
        if "preset" in d:
            base = _preset_kwargs(d.pop("preset"))
        known = {"name", "scenario", "model", "kernel", "n_cells", "t_end", "cfl", "diagnostic_interval",
                 "snapshot_times", "fit", "output_dir", "seed", "description"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kw = dict(base)
        for key in ("name", "n_cells", "t_end", "cfl", "diagnostic_interval", "output_dir", "seed", "description"):
            if key in d:
                kw[key] = d[key]
        if "scenario" in d:
            kw["scenario"] = Scenario.from_value(d["scenario"])
        if "snapshot_times" in d:
            kw["snapshot_times"] = tuple(float(t) for t in d["snapshot_times"])
        model = d.get("model", "nonlocal" if (d.get("kernel") or base.get("kernel")) else "local")
        if model not in ("local", "nonlocal"):
            raise ConfigError(f"model must be 'local' or 'nonlocal', got {model!r}")
        if model == "local":
            kw["kernel"] = None
        elif "kernel" in d:
            kw["kernel"] = KernelSpec.from_dict(d["kernel"])
        elif "kernel" not in kw or kw["kernel"] is None:
            raise ConfigError("nonlocal model needs a kernel")
        fit = d.get("fit") or {}
        if fit:
            kw["fit_kind"] = fit.get("kind")
            kw["fit_window"] = tuple(fit["window"]) if fit.get("window") else None
        if "name" not in kw or "scenario" not in kw:
            raise ConfigError("config needs 'name' and 'scenario'")
        cfg = cls(**kw)
        if fast:
            cfg = replace(cfg, n_cells=FAST_CELLS)
        cfg.validate()
        return cfg

    def validate(self):
        if int(self.n_cells) < 8:
            raise ConfigError("n_cells must be >= 8")
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if not 0 < self.cfl <= 1:
            raise ConfigError("cfl must lie in (0, 1]")
        if self.kernel is not None and self.kernel.delta < 1.0 / self.n_cells:
            raise ConfigError("kernel horizon is below the grid resolution")
        if any(t < 0 or t > self.t_end for t in self.snapshot_times):
            raise ConfigError("snapshot times must lie in [0, t_end]")
        if self.fit_kind not in (None, "exponential", "linear"):
            raise ConfigError(f"unknown fit kind {self.fit_kind!r}")


def load_config(path, fast=False) -> ExperimentConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a key-value tree")
    data.setdefault("name", Path(path).stem)
    return ExperimentConfig.from_dict(data, fast=fast)


# --------------------------------------------------------------------------
# presets: one per panel of the numerical study
# --------------------------------------------------------------------------
def _p(scenario, kernel, t_end, snaps, description, fit_window=None):
    return dict(scenario=scenario, kernel=kernel, t_end=t_end, snapshot_times=snaps,
                description=description, fit_window=fit_window)


PRESETS = {
    "fig-bell-local": _p(Scenario("bell"), None, 5.0, (0, 0.5, 1, 2, 5),
                         "bell-shape initial data, local LWR panel"),
    "fig-bell-linear": _p(Scenario("bell"), KernelSpec.linear(0.2), 5.0, (0, 0.5, 1, 2, 5),
                          "bell-shape initial data, linear decreasing kernel, delta=0.2"),
    "fig-bell-constant": _p(Scenario("bell"), KernelSpec.constant(0.2), 5.0, (0, 0.5, 1, 2, 5),
                            "bell-shape initial data, constant kernel, delta=0.2"),
    "fig-sine-local": _p(Scenario("sine"), None, 5.0, (0, 0.5, 1, 2, 5),
                         "sine-wave initial data, local LWR panel"),
    "fig-sine-linear": _p(Scenario("sine"), KernelSpec.linear(0.5), 5.0, (0, 0.5, 1, 2, 5),
                          "sine-wave initial data, linear decreasing kernel, delta=0.5"),
    "fig-sine-constant": _p(Scenario("sine"), KernelSpec.constant(0.5), 5.0, (0, 0.5, 1, 2, 5),
                            "sine-wave initial data, constant kernel, delta=0.5 (traveling-wave counterexample)"),
    "fig-linear-local": _p(Scenario("linear", beta=0.5), None, 8.0, (0, 0.5, 1, 2, 4, 8),
                           "linear initial data beta=0.5, local LWR panel", fit_window=(2.0, 8.0)),
    "fig-linear-linear": _p(Scenario("linear", beta=0.5), KernelSpec.linear(0.2), 8.0, (0, 0.5, 1, 2, 4, 8),
                            "linear initial data beta=0.5, linear decreasing kernel, delta=0.2"),
    "fig-linear-constant": _p(Scenario("linear", beta=0.5), KernelSpec.constant(0.2), 8.0, (0, 0.5, 1, 2, 4, 8),
                              "linear initial data beta=0.5, constant kernel, delta=0.2"),
    "fig-piecewise-local": _p(Scenario("piecewise"), None, 8.0, (0, 0.5, 1, 2, 4, 8),
                              "piecewise constant initial data, local LWR panel"),
    "fig-piecewise-linear": _p(Scenario("piecewise"), KernelSpec.linear(0.5), 8.0, (0, 0.5, 1, 2, 4, 8),
                               "piecewise constant initial data, linear decreasing kernel, delta=0.5"),
    "fig-piecewise-constant": _p(Scenario("piecewise"), KernelSpec.constant(0.5), 8.0, (0, 0.5, 1, 2, 4, 8),
                                 "piecewise constant initial data, constant kernel, delta=0.5"),
    "fig-compact-linear": _p(Scenario("compact"), KernelSpec.linear(0.2), 5.0, (0, 0.5, 1, 2, 5),
                             "compactly supported initial data (stand-in bump), linear decreasing kernel, "
                             "delta=0.2; outside the positivity assumption"),
}


def _preset_kwargs(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return dict(PRESETS[name], name=name)


def preset(name, fast=False, **overrides) -> ExperimentConfig:
    kw = _preset_kwargs(name)
    kw.update(overrides)
    cfg = ExperimentConfig(**kw)
    if fast:
        cfg = replace(cfg, n_cells=FAST_CELLS)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------
def _write_field_csv(path, rho: DensityField):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("x", "rho"))
        for x, v in zip(rho.x, rho.values):
            writer.writerow((repr(float(x)), repr(float(v))))


def snapshot_filename(t):
    return f"snapshot_t{t:g}.csv"


def _analysis(cfg: ExperimentConfig, initial: DensityField):
    if cfg.kernel is None:
        return {"nu": None, "alpha": None, "tail_bound": None, "lambda_bound": None, "satisfies_A3": None}
    moments = compute_moments(cfg.kernel)
    report = stability_constant(cfg.kernel, moments=moments)
    rho_min = max(initial.min, 0.0)
    return {
        "nu": moments.nu,
        "alpha": report.alpha,
        "alpha_argmin_k": report.argmin_k,
        "tail_bound": report.tail_bound,
        "lambda_bound": diag.theoretical_rate_bound(cfg.kernel, moments, max(report.alpha, 0.0), rho_min),
        "satisfies_A3": cfg.kernel.satisfies_A3,
    }


def _oracle_errors(cfg, initial, result):
    out = {}
    grid = initial.grid
    if cfg.kernel is None and cfg.scenario.kind == "linear":
        exact = LocalLinearSolution(cfg.scenario.beta)
        out["local_linear_l1_error"] = float(np.sum(np.abs(result.final.values - exact.cell_averages(grid, cfg.t_end)))
                                             * grid.dx)
        out["local_linear_exact_l2"] = exact.l2_distance_to_mean(cfg.t_end)
    if cfg.kernel is not None and cfg.kernel.shape == "constant":
        try:
            wave = traveling_wave_exact(initial, cfg.kernel.delta, cfg.t_end)
        except PreconditionError:
            pass
        else:
            out["traveling_wave_l1_error"] = float(np.sum(np.abs(result.final.values - wave.values)) * grid.dx)
    return out


def execute(cfg: ExperimentConfig):
    """Run one experiment in memory; returns (SimulationRun, metadata dict)."""
    initial = build_initial(cfg.scenario, PeriodicGrid(cfg.n_cells))
    result = run(cfg.solver_config(), initial)
    series = result.diagnostics
    meta = {"name": cfg.name, "description": cfg.description, "config": cfg.to_dict(), "status": "ok"}
    meta.update(_analysis(cfg, initial))
    try:
        fit = diag.fit_rate(series, cfg.resolved_fit_kind, cfg.fit_window)
        fit_d = fit.as_dict()
    except FitError as exc:
        fit_d = {"kind": cfg.resolved_fit_kind, "rate": None, "r_squared": None, "window": None,
                 "error": str(exc)}
    fit_d["lambda_bound"] = meta["lambda_bound"]
    fit_d["stagnated"] = diag.is_stagnated(series)
    meta["rate_fit"] = fit_d
    mass = series.array("mass")
    meta.update(
        steps=result.steps,
        outside_theory=result.outside_theory,
        mass_drift=float(np.max(np.abs(mass - mass[0]))),
        initial_min=initial.min,
        initial_max=initial.max,
        run_min=float(series.array("min_rho").min()),
        run_max=float(series.array("max_rho").max()),
        final_l2_error=float(series.l2_error[-1]),
        oracle=_oracle_errors(cfg, initial, result),
    )
    return result, meta


def run_experiment(cfg: ExperimentConfig, output_dir=None) -> int:
    """Run and write diagnostics.csv, snapshot_t<t>.csv files and meta.json. Returns an exit status."""
    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result, meta = execute(cfg)
    except Exception as exc:  # recorded in metadata, reported through the exit status
        log.error("experiment %s failed: %s", cfg.name, exc)
        meta = {"name": cfg.name, "config": cfg.to_dict(), "status": "failed",
                "error": f"{type(exc).__name__}: {exc}"}
        _write_json(out / "meta.json", meta)
        return 1
    result.diagnostics.write_csv(out / "diagnostics.csv")
    for t, snap in result.snapshots:
        _write_field_csv(out / snapshot_filename(t), snap)
    _write_json(out / "meta.json", meta)
    return 0


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


SUMMARY_COLUMNS = ("name", "scenario", "model", "delta", "alpha", "rate", "stagnated", "status")


def _sweep_one(args):
    cfg, out_dir = args
    try:
        status = run_experiment(cfg, out_dir)
        with open(Path(out_dir) / "meta.json") as fh:
            meta = json.load(fh)
    except Exception as exc:
        log.error("sweep entry %s failed: %s", cfg.name, exc)
        status, meta = 1, {}
    fit = meta.get("rate_fit") or {}
    return {
        "name": cfg.name,
        "scenario": cfg.scenario.kind,
        "model": cfg.model,
        "delta": "" if cfg.kernel is None else cfg.kernel.delta,
        "alpha": "" if meta.get("alpha") is None else meta["alpha"],
        "rate": "" if fit.get("rate") is None else fit["rate"],
        "stagnated": fit.get("stagnated", ""),
        "status": meta.get("status", "failed") if status == 0 else "failed",
    }


def sweep(configs, output_root, workers=None):
    """Run configs in parallel (one process per run, per-run directories) and write summary.csv."""
    root = Path(output_root)
    root.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, str(root / cfg.name)) for cfg in configs]
    rows = []
    if jobs:
        workers = workers or min(len(jobs), os.cpu_count() or 1)
        if workers == 1:
            rows = [_sweep_one(job) for job in jobs]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_one, jobs))
    with open(root / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return rows
