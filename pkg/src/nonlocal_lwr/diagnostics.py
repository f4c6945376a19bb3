"""Lyapunov functionals, decay-rate fits and stagnation detection."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import FitError, PreconditionError
from .field import DensityField, l2_distance_to_mean
from .kernels import KernelMoments, KernelSpec

ERROR_FLOOR = 1e-13
ROUNDOFF_STOP = 1e-12
MIN_FIT_SAMPLES = 10

CSV_COLUMNS = ("t", "energy", "l2_error", "kl_divergence", "mass", "min_rho", "max_rho")


def energy(rho: DensityField) -> float:
    """E = 1/2 int (rho - mean)^2 dx."""
    return 0.5 * l2_distance_to_mean(rho) ** 2


def kl_divergence(rho: DensityField) -> float:
    """V = int rho ln(rho / mean) dx; requires a strictly positive density."""
    if rho.min <= 0:
        raise PreconditionError("KL divergence needs a strictly positive density")
    v = rho.values
    val = float(np.sum(v * np.log(v / rho.mean)) * rho.grid.dx)
    return max(val, 0.0)


def kl_bounds(rho: DensityField):
    """Lower/upper bounds ||rho - mean||^2 / (2 max) and ||rho - mean||^2 / (2 min)."""
    sq = l2_distance_to_mean(rho) ** 2
    return sq / (2 * rho.max), sq / (2 * rho.min)


@dataclass
class DiagnosticsSeries:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    l2_error: list = field(default_factory=list)
    kl: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    min_rho: list = field(default_factory=list)
    max_rho: list = field(default_factory=list)

    def record(self, t, rho: DensityField):
        if self.times and t <= self.times[-1]:
            raise ValueError("diagnostic times must be strictly increasing")
        l2 = l2_distance_to_mean(rho)
        self.times.append(float(t))
        self.l2_error.append(l2)
        self.energy.append(0.5 * l2 * l2)
        self.kl.append(kl_divergence(rho) if rho.min > 0 else float("nan"))
        self.mass.append(rho.mass)
        self.min_rho.append(rho.min)
        self.max_rho.append(rho.max)

    def __len__(self):
        return len(self.times)

    def array(self, name):
        return np.asarray(getattr(self, name), dtype=float)

    def write_csv(self, path):
        rows = zip(self.times, self.energy, self.l2_error, self.kl, self.mass, self.min_rho, self.max_rho)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def read_csv(cls, path):
        out = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                out.times.append(float(row["t"]))
                out.energy.append(float(row["energy"]))
                out.l2_error.append(float(row["l2_error"]))
                out.kl.append(float(row["kl_divergence"]))
                out.mass.append(float(row["mass"]))
                out.min_rho.append(float(row["min_rho"]))
                out.max_rho.append(float(row["max_rho"]))
        return out


@dataclass(frozen=True)
class RateFit:
    kind: str
    rate: float
    r_squared: float
    window: tuple
    n_samples: int
    prefactor: float

    def as_dict(self):
        return {"kind": self.kind, "rate": self.rate, "r_squared": self.r_squared,
                "window": list(self.window), "n_samples": self.n_samples}


def default_window(series: DiagnosticsSeries):
    t = series.array("times")
    return (t[0] + 0.2 * (t[-1] - t[0]), t[-1])


def fit_rate(series: DiagnosticsSeries, kind="exponential", window=None) -> RateFit:
    """Least-squares decay rate of the L2 error.

    ``exponential``: ln(err) against t, rate = -slope (err ~ C exp(-rate t)).
    ``linear``: ln(err) against ln(t), rate = -slope (rate ~ 1 for err ~ C / t).
    Samples after the error first drops below 1e-12 are ignored.
    """
    kind = kind.lower()
    if kind not in ("exponential", "linear"):
        raise ValueError(f"unknown fit kind {kind!r}")
    t = series.array("times")
    err = series.array("l2_error")
    if window is None:
        window = default_window(series)
    t0, t1 = window
    below = np.flatnonzero(err < ROUNDOFF_STOP)
    stop = below[0] if below.size else len(t)
    idx = np.arange(len(t))
    mask = (t >= t0 - 1e-12) & (t <= t1 + 1e-12) & (err > ERROR_FLOOR) & (idx < stop)
    if kind == "linear":
        mask &= t > 0
    if mask.sum() < MIN_FIT_SAMPLES:
        raise FitError(f"only {int(mask.sum())} usable samples in window {window}")
    x = t[mask] if kind == "exponential" else np.log(t[mask])
    y = np.log(err[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(kind=kind, rate=float(-slope), r_squared=max(r2, 0.0),
                   window=(float(t[mask][0]), float(t[mask][-1])),
                   n_samples=int(mask.sum()), prefactor=float(np.exp(intercept)))


def theoretical_rate_bound(spec: KernelSpec, moments: KernelMoments, alpha: float, rho_min: float) -> float:
    """lambda = nu * alpha * rho_min, the guaranteed L2 decay rate."""
    if alpha < 0 or rho_min < 0:
        raise ValueError("alpha and rho_min must be nonnegative")
    return moments.nu * alpha * rho_min


def is_stagnated(series: DiagnosticsSeries, tail_fraction=0.3, ratio=2.0) -> bool:
    """Error varies by less than ``ratio`` over the last ``tail_fraction`` of the horizon."""
    t = series.array("times")
    err = series.array("l2_error")
    t_start = t[-1] - tail_fraction * (t[-1] - t[0])
    tail = err[t >= t_start]
    if tail.size < 2 or tail.min() <= 0:
        return False
    return bool(tail.max() / tail.min() < ratio)
