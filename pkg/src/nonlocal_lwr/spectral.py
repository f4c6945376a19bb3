"""Fourier symbols of the nonlocal gradient and the stability constant alpha.

For a mode exp(2 pi i k x) the nonlocal gradient acts by multiplication with
``i b(k) + c(k)`` where

    b(k) = (1/nu) int_0^delta sin(2 pi k s) w(s) ds
    c(k) = (1/nu) int_0^delta (cos(2 pi k s) - 1) w(s) ds

and the nonlocal diffusion operator d/dx D has eigenvalues
``-2 pi k b(k) + 2 pi i k c(k)``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._quad import gauss_panels
from .exceptions import ConsistencyError, PreconditionError
from .kernels import KernelMoments, KernelSpec, compute_moments, validate_A3

log = logging.getLogger(__name__)

# quadrature panels per oscillation period (8 Gauss points each -> 32 nodes/period)
_PANELS_PER_PERIOD = 4
_MIN_PANELS = 16
_ROUNDOFF = 1e-11


@dataclass(frozen=True)
class SpectralReport:
    k_max: int
    b: np.ndarray
    c: np.ndarray
    alpha: float
    eigenvalues: np.ndarray
    tail_bound: float
    argmin_k: int

    @property
    def k(self):
        return np.arange(1, self.k_max + 1)

    @property
    def two_pi_k_b(self):
        return 2 * np.pi * self.k * self.b

    @property
    def tail_certified(self):
        """The k -> infinity liminf bound does not undercut the discrete minimum."""
        return self.tail_bound >= self.alpha


def _coefficients(spec, nu, k):
    k = float(k)
    n_panels = max(_MIN_PANELS, int(np.ceil(_PANELS_PER_PERIOD * abs(k) * spec.delta)) + 4)
    s, wq = gauss_panels(spec.breakpoints(), n_panels)
    w = spec(s) * wq
    phase = 2 * np.pi * k * s
    b = float(np.sin(phase) @ w) / nu
    # cos(x) - 1 = -2 sin^2(x/2) avoids cancellation at small k*delta
    c = float(-2.0 * np.sin(0.5 * phase) ** 2 @ w) / nu
    return b, c


def fourier_coefficients(spec: KernelSpec, moments: KernelMoments | None, k: int):
    """Return ``(b(k), c(k))`` by direct quadrature of the defining integrals."""
    if moments is None:
        moments = compute_moments(spec)
    return _coefficients(spec, moments.nu, k)


def coefficient_arrays(spec, moments, ks):
    ks = np.asarray(ks)
    out = np.array([_coefficients(spec, moments.nu, k) for k in ks.ravel()])
    return out[:, 0].reshape(ks.shape), out[:, 1].reshape(ks.shape)


def stability_constant(spec: KernelSpec, k_max: int = 256, moments: KernelMoments | None = None) -> SpectralReport:
    """alpha = min over 1 <= k <= k_max of 2 pi k b(k), with the analytic tail bound.

    The tail bound (w(0) - w(delta)) / nu is the liminf of 2 pi k b(k) for C^1
    kernels; it is reported alongside, not folded into alpha.
    """
    if k_max < 8:
        raise ValueError("k_max must be >= 8")
    if moments is None:
        moments = compute_moments(spec)
    ks = np.arange(1, k_max + 1)
    b, c = coefficient_arrays(spec, moments, ks)
    growth = 2 * np.pi * ks * b
    # quadrature roundoff scales with the integrand size 2 pi k / nu; values below it are zero
    # (e.g. b(1/delta) for the constant kernel)
    noise = _ROUNDOFF * 2 * np.pi * ks / moments.nu
    snapped = np.where(np.abs(growth) <= noise, 0.0, growth)
    alpha = float(snapped.min())
    # ties (e.g. delta = 1/m for the linear kernel, where every k gives 6/delta^2) go to the lowest k
    i = int(np.flatnonzero(snapped <= alpha + 1e-9 * max(abs(alpha), noise[0]))[0])
    tail = (moments.w0 - moments.wdelta) / moments.nu
    if alpha <= 0 and validate_A3(spec):
        raise ConsistencyError(f"alpha = {alpha} <= 0 for a non-increasing, non-constant kernel")
    if tail < alpha:
        log.warning("tail bound %.6g is below the discrete minimum %.6g; k_max=%d may be too small",
                    tail, alpha, k_max)
    eig = -growth + 1j * 2 * np.pi * ks * c
    return SpectralReport(k_max=k_max, b=b, c=c, alpha=alpha, eigenvalues=eig,
                          tail_bound=float(tail), argmin_k=int(ks[i]))


def linearized_exponents(spec, rho_bar, n_modes, moments=None):
    """Exponents of modes k = 0..n_modes-1 for the equation linearized about rho_bar."""
    if moments is None:
        moments = compute_moments(spec)
    ks = np.arange(n_modes)
    b, c = coefficient_arrays(spec, moments, ks)
    two_pi_k = 2 * np.pi * ks
    return (-1j * two_pi_k * (1 - 2 * rho_bar)
            + moments.nu * rho_bar * (-two_pi_k * b + 1j * two_pi_k * c))


def evolve_linearized(spec: KernelSpec, rho_bar: float, initial_modes, t: float, moments=None):
    """Exact evolution of Fourier amplitudes k = 0, 1, ... of a mean-zero perturbation."""
    modes = np.asarray(initial_modes, dtype=complex)
    if t < 0:
        raise ValueError("t must be nonnegative")
    if modes.size and abs(modes[0]) > 1e-14:
        raise PreconditionError("perturbation must have zero mean (mode 0 amplitude must vanish)")
    lam = linearized_exponents(spec, rho_bar, modes.size, moments)
    return modes * np.exp(lam * t)
