"""Lax-Friedrichs time stepping for the local and nonlocal LWR models on a ring."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .diagnostics import DiagnosticsSeries
from .exceptions import CFLError, NumericalFailure
from .field import DensityField, PeriodicGrid, nonlocal_operator
from .kernels import KernelSpec

log = logging.getLogger(__name__)

SPEED_FLOOR = 1e-6


@dataclass(frozen=True)
class DesiredSpeed:
    """Speed-density law. Only Greenshields U(rho) = 1 - rho is implemented."""

    kind: str = "greenshields"

    def __post_init__(self):
        if self.kind != "greenshields":
            raise ValueError(f"unsupported speed law {self.kind!r}")

    def __call__(self, rho):
        return 1.0 - rho

    def derivative(self, rho):
        return -np.ones_like(rho)

    @property
    def max_abs_derivative(self):
        return 1.0


@dataclass(frozen=True)
class SolverConfig:
    grid: PeriodicGrid
    t_end: float
    kernel: Optional[KernelSpec] = None
    speed_law: DesiredSpeed = field(default_factory=DesiredSpeed)
    cfl: float = 0.5
    snapshot_times: tuple = ()
    diagnostic_interval: float = 0.01
    conv_method: str = "fft"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.diagnostic_interval <= 0:
            raise ValueError("diagnostic_interval must be positive")
        snaps = tuple(sorted(float(t) for t in self.snapshot_times))
        if snaps and (snaps[0] < 0 or snaps[-1] > self.t_end + 1e-12):
            raise ValueError("snapshot times must lie in [0, t_end]")
        object.__setattr__(self, "snapshot_times", snaps)

    @property
    def model(self):
        return "local" if self.kernel is None else "nonlocal"


@dataclass
class SimulationRun:
    config: SolverConfig
    initial: DensityField
    diagnostics: DiagnosticsSeries
    snapshots: list
    final: DensityField
    steps: int = 0
    outside_theory: bool = False


def _velocity(values, config):
    if config.kernel is None:
        return config.speed_law(values), None
    w = nonlocal_operator(config.kernel, config.grid.n_cells).apply(values, config.conv_method)
    return config.speed_law(w), w


def _max_speed(values, config, w=None):
    if config.kernel is None:
        # |f'(rho)| = |U(rho) + rho U'(rho)|
        speed = np.abs(config.speed_law(values) + values * config.speed_law.derivative(values))
    else:
        if w is None:
            w = nonlocal_operator(config.kernel, config.grid.n_cells).apply(values, config.conv_method)
        speed = np.abs(config.speed_law(w)) + np.abs(values) * config.speed_law.max_abs_derivative
    return max(float(speed.max()), SPEED_FLOOR)


def max_wave_speed(rho: DensityField, config: SolverConfig) -> float:
    """Characteristic-speed bound used for the CFL time step (floored at 1e-6)."""
    return _max_speed(rho.values, config)


def _lf_update(values, flux, lam):
    return 0.5 * (np.roll(values, 1) + np.roll(values, -1)) - 0.5 * lam * (np.roll(flux, -1) - np.roll(flux, 1))


def lax_friedrichs_step(rho: DensityField, config: SolverConfig, dt: float) -> DensityField:
    """One step of rho_j <- (rho_{j-1} + rho_{j+1})/2 - dt/(2 dx) (F_{j+1} - F_{j-1})."""
    values = rho.values
    u, w = _velocity(values, config)
    dx = config.grid.dx
    limit = config.cfl * dx / _max_speed(values, config, w)
    if not dt > 0 or dt > limit * (1 + 1e-12):
        raise CFLError(f"dt={dt:.6g} exceeds CFL limit {limit:.6g}")
    new = _lf_update(values, values * u, dt / dx)
    if not np.all(np.isfinite(new)):
        raise NumericalFailure("non-finite density after Lax-Friedrichs step")
    return rho.with_values(new)


def _event_times(config):
    interval = config.diagnostic_interval
    n = int(np.floor(config.t_end / interval + 1e-9))
    diag = [round(k * interval, 12) for k in range(n + 1)]
    snaps = {round(t, 12) for t in config.snapshot_times}
    times = set(diag) | snaps | {config.t_end}
    return sorted(times), set(diag) | {config.t_end}


def run(config: SolverConfig, initial: DensityField,
        on_step: Callable[[float, np.ndarray], None] | None = None) -> SimulationRun:
    """Advance ``initial`` to ``config.t_end``.

    The time step is recomputed every step from the current wave speed and
    clipped so that diagnostic and snapshot times are hit exactly.
    ``on_step(t, values)`` is called after every step.
    """
    if initial.grid != config.grid:
        raise ValueError("initial field lives on a different grid")
    outside = config.kernel is not None and not (initial.min > 0 and initial.max <= 1)
    if outside:
        log.warning("initial data violates 0 < rho_min <= rho_max <= 1; run tagged outside-theory")

    events, diag_times = _event_times(config)
    snap_set = {round(t, 12) for t in config.snapshot_times}
    diagnostics = DiagnosticsSeries()
    snapshots = []

    dx = config.grid.dx
    values = np.array(initial.values)
    t = 0.0
    step = 0

    def emit(t_event, vals):
        field_ = DensityField(config.grid, vals)
        if t_event in diag_times:
            diagnostics.record(t_event, field_)
            if not np.all(np.isfinite([diagnostics.energy[-1], diagnostics.mass[-1]])):
                raise NumericalFailure(f"non-finite diagnostics at step {step}, t={t_event}")
        if t_event in snap_set:
            snapshots.append((t_event, field_))

    emit(0.0, values)
    for target in events:
        if target <= 0.0:
            continue
        while t < target:
            u, w = _velocity(values, config)
            dt = config.cfl * dx / _max_speed(values, config, w)
            last = t + dt >= target * (1 - 1e-14)
            if last:
                dt = target - t
            values = _lf_update(values, values * u, dt / dx)
            step += 1
            t = target if last else t + dt
            if not np.all(np.isfinite(values)):
                raise NumericalFailure(f"non-finite density at step {step}, t={t:.6g}")
            if on_step is not None:
                on_step(t, values)
        emit(target, values)

    return SimulationRun(config=config, initial=initial, diagnostics=diagnostics, snapshots=snapshots,
                         final=DensityField(config.grid, values), steps=step, outside_theory=outside)
