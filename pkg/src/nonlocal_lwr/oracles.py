"""Exact solutions and inequality checkers used to validate the solver and the analysis."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import PreconditionError
from .field import (DensityField, PeriodicGrid, centered_derivative, nonlocal_gradient,
                    spectral_derivative)
from .kernels import KernelSpec, compute_moments

INEQUALITY_TOL = 1e-8


# --------------------------------------------------------------------------
# local LWR with linear initial data rho_0(x) = beta x
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class LocalLinearSolution:
    """Entropy solution of rho_t + (rho(1 - rho))_x = 0, rho_0(x) = beta x on the ring.

    Before t = 1/(2 beta) a rarefaction fan from the jump at x = 0 eats into
    the steepening ramp. Afterwards the profile is a single ramp of slope
    -1/(2t) terminated by a shock travelling at speed 1 - beta.
    """

    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")

    @property
    def shock_time(self):
        return np.inf if self.beta == 0 else 1.0 / (2 * self.beta)

    @property
    def shock_speed(self):
        return 1.0 - self.beta

    def jump(self, t):
        """(rho_l, rho_r) on either side of the shock, t > shock_time."""
        return self.beta / 2 - 1 / (4 * t), self.beta / 2 + 1 / (4 * t)

    def shock_position(self, t):
        return 0.5 + self.shock_speed * t

    def breakpoints(self, t):
        """Positions in [0, 1) where the solution has a kink or a jump."""
        if self.beta == 0 or t == 0:
            return np.array([0.0])
        if t <= self.shock_time:
            pts = [(1 - 2 * self.beta) * t, t]
        else:
            pts = [self.shock_position(t)]
        return np.mod(pts, 1.0)

    def __call__(self, x, t):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        beta = self.beta
        if beta == 0:
            return np.zeros_like(x)
        if t == 0:
            return beta * x
        if t <= self.shock_time:
            lo = (1 - 2 * beta) * t
            xs = lo + np.mod(x - lo, 1.0)
            in_fan = xs < t
            out = np.empty_like(xs)
            out[in_fan] = (t - xs[in_fan]) / (2 * t)
            if 2 * beta * t < 1:
                out[~in_fan] = beta * (xs[~in_fan] - t) / (1 - 2 * beta * t)
            else:
                out[~in_fan] = 0.0
            return out if out.ndim else float(out)
        xs = self.shock_position(t)
        offset = np.mod(xs - x, 1.0)
        # offset == 0 is the point just right of the shock
        offset = np.where(offset == 0.0, 1.0, offset)
        return 0.5 - (xs - offset) / (2 * t)

    def cell_averages(self, grid: PeriodicGrid, t):
        """Exact cell averages: split cells at the kinks, midpoint rule per piece."""
        edges = np.arange(grid.n_cells + 1) * grid.dx
        pts = np.union1d(edges, self.breakpoints(t))
        pts = pts[(pts >= 0) & (pts <= 1)]
        mids = 0.5 * (pts[1:] + pts[:-1])
        lengths = np.diff(pts)
        vals = self(mids, t) * lengths
        cell = np.minimum((mids * grid.n_cells).astype(int), grid.n_cells - 1)
        return np.bincount(cell, weights=vals, minlength=grid.n_cells) / grid.dx

    def l2_distance_to_mean(self, t, n_cells=20000):
        """Quadrature of ||rho(., t) - beta/2||_2 on a split grid."""
        pts = np.union1d(np.linspace(0, 1, n_cells + 1), self.breakpoints(t))
        mids = 0.5 * (pts[1:] + pts[:-1])
        half = 0.5 * np.diff(pts)
        # (rho - mean)^2 is quadratic on each piece: 2-point Gauss is exact
        r = half / np.sqrt(3.0)
        sq = lambda y: (self(y, t) - self.beta / 2) ** 2
        return float(np.sqrt(np.sum(half * (sq(mids - r) + sq(mids + r)))))


def local_linear_exact(beta, x, t):
    return LocalLinearSolution(beta)(x, t)


# --------------------------------------------------------------------------
# constant-kernel traveling wave
# --------------------------------------------------------------------------
def _fourier_shift(values, shift):
    """Evaluate the trigonometric interpolant at x - shift (shift in domain units)."""
    n = len(values)
    k = np.fft.rfftfreq(n, d=1.0 / n)
    return np.fft.irfft(np.fft.rfft(values) * np.exp(-2j * np.pi * k * shift), n=n)


def traveling_wave_exact(rho0: DensityField, delta: float, t: float) -> DensityField:
    """rho_0(x - (1 - mean) t) for delta-periodic data under the constant kernel."""
    m = 1.0 / delta
    if abs(m - round(m)) > 1e-9:
        raise PreconditionError(f"delta={delta} is not 1/m for an integer m")
    n = rho0.grid.n_cells
    cells = delta * n
    if abs(cells - round(cells)) < 1e-9:
        period_copy = np.roll(rho0.values, -int(round(cells)))
    else:
        period_copy = _fourier_shift(rho0.values, -delta)
    if np.max(np.abs(period_copy - rho0.values)) > 1e-10:
        raise PreconditionError(f"initial data is not {delta}-periodic")
    speed = 1.0 - rho0.mean
    return rho0.with_values(_fourier_shift(rho0.values, speed * t))


# --------------------------------------------------------------------------
# inequality checkers
# --------------------------------------------------------------------------
class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _derivative(rho, how):
    if how == "spectral":
        return spectral_derivative(rho)
    if how == "centered":
        return centered_derivative(rho)
    raise ValueError(f"unknown derivative {how!r}")


def upsample(rho: DensityField, factor=2) -> DensityField:
    """Resample the trigonometric interpolant of ``rho`` on a grid ``factor`` times finer."""
    n = rho.grid.n_cells
    fine = PeriodicGrid(factor * n)
    spec = np.fft.rfft(rho.values)
    if n % 2 == 0:
        spec[-1] *= 0.5
    # cell centres move from (j + 1/2)/n to (j + 1/2)/(factor n): phase-shift by the offset
    k = np.arange(spec.size)
    spec = spec * np.exp(-2j * np.pi * k * (0.5 / n - 0.5 / fine.n_cells))
    padded = np.zeros(fine.n_cells // 2 + 1, dtype=complex)
    padded[:spec.size] = spec * factor
    return DensityField(fine, np.fft.irfft(padded, n=fine.n_cells))


def _forms(rho, spec, moments, derivative):
    d = _derivative(rho, derivative)
    g = nonlocal_gradient(rho, spec, moments).values
    dx = rho.grid.dx
    return float(np.sum(d * g) * dx), float(np.sum(rho.values * d * g) * dx)


def _quadratic_forms(rho, spec, moments, derivative, extrapolate):
    """(int rho' D rho, int rho rho' D rho), optionally Richardson-extrapolated in dx^2.

    Extrapolation resamples the trigonometric interpolant on a doubled grid, so
    it is only meaningful for band-limited (trig polynomial) data.
    """
    if moments is None:
        moments = compute_moments(spec)
    coarse = np.array(_forms(rho, spec, moments, derivative))
    if not extrapolate:
        return coarse
    fine = np.array(_forms(upsample(rho), spec, moments, derivative))
    return (4.0 * fine - coarse) / 3.0


def poincare_form(rho: DensityField, spec: KernelSpec, moments=None, derivative="spectral",
                  extrapolate=False) -> float:
    """int d_x rho * D rho dx on the grid of ``rho``."""
    return float(_quadratic_forms(rho, spec, moments, derivative, extrapolate)[0])


def check_nonlocal_poincare(rho: DensityField, spec: KernelSpec, alpha: float, moments=None,
                            derivative="spectral", extrapolate=False, tol=INEQUALITY_TOL) -> InequalityCheck:
    """int d_x rho D rho dx >= alpha int (rho - mean)^2 dx."""
    lhs = poincare_form(rho, spec, moments, derivative, extrapolate)
    dev = rho.values - rho.mean
    rhs = alpha * float(np.sum(dev * dev) * rho.grid.dx)
    return InequalityCheck(lhs, rhs, lhs >= rhs - tol)


def check_hardy_littlewood(rho_samples, f_monotone: Callable, shift: int, tol=1e-12) -> bool:
    """sum f(rho_i) rho_{i+shift} <= sum f(rho_i) rho_i for nondecreasing f."""
    rho = np.asarray(rho_samples, dtype=float)
    n = len(rho)
    if not 0 <= shift < n:
        raise ValueError("shift must lie in [0, N)")
    f = np.asarray(f_monotone(rho), dtype=float)
    return float(f @ np.roll(rho, -shift)) <= float(f @ rho) + tol


def check_nonlinear_poincare(rho: DensityField, spec: KernelSpec, moments=None, derivative="spectral",
                             extrapolate=False, tol=INEQUALITY_TOL) -> InequalityCheck:
    """int rho d_x rho D rho dx >= min(rho) int d_x rho D rho dx."""
    if rho.min < 0:
        raise PreconditionError("density must be nonnegative")
    form, weighted = _quadratic_forms(rho, spec, moments, derivative, extrapolate)
    lhs = float(weighted)
    rhs = rho.min * float(form)
    return InequalityCheck(lhs, rhs, lhs >= rhs - tol)


def random_trig_polynomial(rng: np.random.Generator, grid: PeriodicGrid, n_modes=8, amplitude=0.1,
                           offset=0.5, positive=True, max_tries=1000) -> DensityField:
    """offset + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), coefficients uniform in [-amplitude, amplitude].

    With ``positive`` the draw is repeated until the sampled field is strictly positive.
    """
    x = grid.cell_centers
    k = np.arange(1, n_modes + 1)[:, None]
    for _ in range(max_tries):
        a = rng.uniform(-amplitude, amplitude, n_modes)
        b = rng.uniform(-amplitude, amplitude, n_modes)
        vals = offset + a @ np.cos(2 * np.pi * k * x) + b @ np.sin(2 * np.pi * k * x)
        if not positive or vals.min() > 0:
            return DensityField(grid, vals)
    raise RuntimeError("could not draw a positive trigonometric polynomial")
