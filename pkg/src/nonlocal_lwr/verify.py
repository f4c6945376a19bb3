"""Seeded randomized verification of the inequalities behind the stability estimate."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import DensityField, PeriodicGrid
from .kernels import KernelSpec, compute_moments
from .oracles import (check_hardy_littlewood, check_nonlinear_poincare, check_nonlocal_poincare,
                      poincare_form, random_trig_polynomial)
from .spectral import fourier_coefficients, stability_constant

# divisible by 5 * 2^11 so that delta in {0.2, 0.5, 1} spans a whole number of cells;
# quadratic forms are Richardson-extrapolated from this grid and its doubling
VERIFY_CELLS = 10240
IDENTITY_RTOL = 1e-6
MODE_RTOL = 1e-8


@dataclass
class CheckRow:
    """Outcome of one randomized check; ``lhs``/``rhs`` belong to the case with the smallest margin."""

    name: str
    cases: int
    failures: int
    min_margin: float
    lhs: float = np.nan
    rhs: float = np.nan


def _margin_row(name, margins, ok, lhs=None, rhs=None):
    margins = np.asarray(margins, dtype=float)
    if not margins.size:
        return CheckRow(name, 0, 0, np.nan)
    i = int(np.argmin(margins))
    worst = lambda seq: float(seq[i]) if seq is not None else np.nan
    return CheckRow(name, len(margins), int(np.sum(~np.asarray(ok))), float(margins[i]), worst(lhs), worst(rhs))


def poincare_rows(rng, n_polys, kernels=None):
    kernels = kernels or [KernelSpec.linear(0.2), KernelSpec.linear(0.5)]
    grid = PeriodicGrid(VERIFY_CELLS)
    rows = []
    for spec in kernels:
        moments = compute_moments(spec)
        alpha = stability_constant(spec, moments=moments).alpha
        lin, nonlin = [], []
        for _ in range(n_polys):
            rho = random_trig_polynomial(rng, grid)
            lin.append(check_nonlocal_poincare(rho, spec, alpha, moments, extrapolate=True))
            nonlin.append(check_nonlinear_poincare(rho, spec, moments, extrapolate=True))
        tag = f"{spec.shape},delta={spec.delta:g}"
        for label, checks in (("nonlocal-poincare", lin), ("nonlinear-poincare", nonlin)):
            rows.append(_margin_row(f"{label}[{tag}]", [c.lhs - c.rhs for c in checks], [c.holds for c in checks],
                                    [c.lhs for c in checks], [c.rhs for c in checks]))
    return rows


def hardy_littlewood_row(rng, n_sequences, length=8):
    margins, ok, lhs, rhs = [], [], [], []
    for _ in range(n_sequences):
        rho = rng.uniform(0.0, 1.0, length)
        f = lambda r, lo=rho.min(): 0.5 * (r - lo) ** 2
        fr = f(rho)
        for shift in range(length):
            # the rearranged sum is the smaller side
            lhs.append(float(fr @ rho))
            rhs.append(float(fr @ np.roll(rho, -shift)))
            margins.append(lhs[-1] - rhs[-1])
            ok.append(check_hardy_littlewood(rho, f, shift))
    return _margin_row(f"hardy-littlewood[N={length}]", margins, ok, lhs, rhs)


def special_kernel_row(rng, n_polys=20):
    """delta = 1, w(s) = 2(1 - s): the quadratic form equals 6 ||rho - mean||^2."""
    spec = KernelSpec.linear(1.0)
    moments = compute_moments(spec)
    grid = PeriodicGrid(VERIFY_CELLS)
    margins, lhs, rhs = [], [], []
    for _ in range(n_polys):
        rho = random_trig_polynomial(rng, grid)
        dev = rho.values - rho.mean
        rhs.append(6.0 * float(np.sum(dev * dev) * grid.dx))
        lhs.append(poincare_form(rho, spec, moments, extrapolate=True))
        margins.append(IDENTITY_RTOL - abs(lhs[-1] - rhs[-1]) / rhs[-1])
    margins = np.asarray(margins)
    return _margin_row("special-kernel-identity", margins, margins >= 0, lhs, rhs)


def single_mode_row(spec=None, modes=(1, 2, 3)):
    """Quadratic form / L2 norm of a single mode against 2 pi k b(k) from quadrature."""
    spec = spec or KernelSpec.linear(0.2)
    moments = compute_moments(spec)
    grid = PeriodicGrid(VERIFY_CELLS)
    margins, lhs, rhs = [], [], []
    for k in modes:
        rho = DensityField.from_function(grid, lambda x: 0.5 + 0.1 * np.sin(2 * np.pi * k * x))
        dev = rho.values - rho.mean
        lhs.append(poincare_form(rho, spec, moments, extrapolate=True) / float(np.sum(dev * dev) * grid.dx))
        b, _ = fourier_coefficients(spec, moments, k)
        rhs.append(2 * np.pi * k * b)
        margins.append(MODE_RTOL - abs(lhs[-1] - rhs[-1]) / abs(rhs[-1]))
    margins = np.asarray(margins)
    return _margin_row("single-mode-ratio", margins, margins >= 0, lhs, rhs)


def run_verification(seed=0, n_polys=100):
    rng = np.random.default_rng(seed)
    rows = poincare_rows(rng, n_polys)
    rows.append(hardy_littlewood_row(rng, n_polys))
    rows.append(special_kernel_row(rng))
    rows.append(single_mode_row())
    return rows
