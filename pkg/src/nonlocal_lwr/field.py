"""Periodic grid, density fields and discrete nonlocal operators on the ring [0, 1)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ResolutionError
from .kernels import KernelMoments, KernelSpec, compute_moments


@dataclass(frozen=True)
class PeriodicGrid:
    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 8:
            raise ValueError(f"n_cells must be an integer >= 8, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))

    @property
    def dx(self):
        return 1.0 / self.n_cells

    @property
    def cell_centers(self):
        return (np.arange(self.n_cells) + 0.5) / self.n_cells


class DensityField:
    """Cell values of a density on a periodic grid. Values are read-only."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: PeriodicGrid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n_cells,):
            raise ValueError(f"expected {grid.n_cells} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    @classmethod
    def from_function(cls, grid, f):
        return cls(grid, f(grid.cell_centers))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.n_cells, float(value)))

    def with_values(self, values):
        return DensityField(self.grid, values)

    @property
    def x(self):
        return self.grid.cell_centers

    @property
    def mean(self):
        return float(np.sum(self.values) * self.grid.dx)

    @property
    def mass(self):
        return self.mean

    @property
    def min(self):
        return float(self.values.min())

    @property
    def max(self):
        return float(self.values.max())

    def in_unit_range(self):
        return self.min >= 0.0 and self.max <= 1.0

    def __repr__(self):
        return f"DensityField(n_cells={self.grid.n_cells}, min={self.min:.4g}, max={self.max:.4g})"


class NonlocalOperator:
    """Grid discretization of W[rho](x_j) = int_0^delta rho(x_j + s) w(s) ds.

    Quadrature nodes are the cell midpoints s_m = (m + 1/2) dx, m < floor(delta/dx);
    rho(x_j + s_m) is the average of the two neighbouring cell values, so each
    node contributes half its weight to offsets m and m + 1. Weights are
    renormalized to sum to one, which makes W an exact average (constants are
    preserved, W stays within [min rho, max rho]). A partial last cell when
    delta/dx is not an integer is dropped.
    """

    def __init__(self, spec: KernelSpec, n_cells: int):
        dx = 1.0 / n_cells
        n_nodes = int(np.floor(spec.delta / dx + 1e-9))
        if n_nodes < 1:
            raise ResolutionError(f"delta={spec.delta} is smaller than dx={dx}")
        s = (np.arange(n_nodes) + 0.5) * dx
        q = np.asarray(spec(s), dtype=float)
        q = q / q.sum()
        coeffs = np.zeros(n_cells)
        offsets = np.arange(n_nodes)
        np.add.at(coeffs, offsets % n_cells, 0.5 * q)
        np.add.at(coeffs, (offsets + 1) % n_cells, 0.5 * q)
        self.spec = spec
        self.n_cells = n_cells
        self.n_nodes = n_nodes
        self.coeffs = coeffs
        self.offsets = np.flatnonzero(coeffs)
        # W_j = sum_m coeffs[m] rho[j + m] is a circular correlation
        self._symbol = np.conj(np.fft.rfft(coeffs))

    def apply(self, values, method="fft"):
        if method == "fft":
            return np.fft.irfft(np.fft.rfft(values) * self._symbol, n=self.n_cells)
        if method == "direct":
            out = np.zeros(self.n_cells)
            for m in self.offsets:
                out += self.coeffs[m] * np.roll(values, -m)
            return out
        raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=64)
def nonlocal_operator(spec: KernelSpec, n_cells: int) -> NonlocalOperator:
    return NonlocalOperator(spec, n_cells)


def nonlocal_average(rho: DensityField, spec: KernelSpec, method="fft") -> DensityField:
    op = nonlocal_operator(spec, rho.grid.n_cells)
    return rho.with_values(op.apply(rho.values, method))


def nonlocal_gradient(rho: DensityField, spec: KernelSpec, moments: KernelMoments | None = None,
                      method="fft") -> DensityField:
    """D rho = (W[rho] - rho) / nu with the same renormalized weights as W."""
    if moments is None:
        moments = compute_moments(spec)
    op = nonlocal_operator(spec, rho.grid.n_cells)
    w = op.apply(rho.values, method)
    return rho.with_values((w - rho.values) / moments.nu)


def l2_distance_to_mean(rho: DensityField) -> float:
    dev = rho.values - rho.mean
    return float(np.sqrt(np.sum(dev * dev) * rho.grid.dx))


def spectral_derivative(rho: DensityField) -> np.ndarray:
    """Exact derivative of the trigonometric interpolant of the cell values."""
    n = rho.grid.n_cells
    k = np.fft.rfftfreq(n, d=1.0 / n)
    rho_hat = np.fft.rfft(rho.values)
    d_hat = 2j * np.pi * k * rho_hat
    if n % 2 == 0:
        d_hat[-1] = 0.0
    return np.fft.irfft(d_hat, n=n)


def centered_derivative(rho: DensityField) -> np.ndarray:
    v = rho.values
    return (np.roll(v, -1) - np.roll(v, 1)) / (2 * rho.grid.dx)
