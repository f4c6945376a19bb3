"""Look-ahead kernels w_delta on [0, delta] and their moments."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._quad import gauss_panels, panels_for_nodes
from .exceptions import KernelDomainError, KernelError

SHAPES = ("constant", "linear", "rescaled", "tabulated")

MASS_TOL = 1e-6
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """A normalized nonnegative kernel supported on [0, delta].

    ``shape`` is one of ``constant`` (1/delta), ``linear`` (2(delta - s)/delta^2),
    ``rescaled`` (profile(s/delta)/delta for a profile on [0, 1]) or
    ``tabulated`` (piecewise linear through equispaced ``samples``).
    Rescaled profiles and tabulated samples are normalized to unit mass on
    construction, so only their shape matters.
    """

    delta: float
    shape: str = "linear"
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=True)
    samples: Optional[tuple] = None
    _scale: float = field(default=1.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        delta = float(self.delta)
        if not (0.0 < delta <= 1.0) or not np.isfinite(delta):
            raise KernelError(f"delta must lie in (0, 1], got {self.delta!r}")
        object.__setattr__(self, "delta", delta)
        if self.shape not in SHAPES:
            raise KernelError(f"unknown kernel shape {self.shape!r}; expected one of {SHAPES}")
        if self.shape == "rescaled":
            if self.profile is None:
                raise KernelError("rescaled kernel needs a profile on [0, 1]")
            x, wq = gauss_panels([0.0, 1.0], 64)
            vals = np.asarray(self.profile(x), dtype=float)
            if np.any(vals < 0):
                raise KernelError("profile takes negative values")
            mass = float(wq @ vals)
            if mass <= 0:
                raise KernelError("profile has zero mass")
            object.__setattr__(self, "_scale", 1.0 / mass)
        elif self.shape == "tabulated":
            if self.samples is None or len(self.samples) < 2:
                raise KernelError("tabulated kernel needs at least two samples")
            samples = tuple(float(v) for v in self.samples)
            arr = np.asarray(samples)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise KernelError("tabulated samples must be finite and nonnegative")
            # trapezoid is exact for the piecewise-linear interpolant
            mass = float(np.sum(0.5 * (arr[1:] + arr[:-1]))) / (len(arr) - 1)
            if mass <= 0:
                raise KernelError("tabulated samples have zero mass")
            object.__setattr__(self, "samples", samples)
            object.__setattr__(self, "_scale", 1.0 / mass)

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, delta):
        return cls(delta, "constant")

    @classmethod
    def linear(cls, delta):
        return cls(delta, "linear")

    @classmethod
    def rescaled(cls, profile, delta):
        return cls(delta, "rescaled", profile=profile)

    @classmethod
    def tabulated(cls, samples, delta):
        return cls(delta, "tabulated", samples=tuple(samples))

    @classmethod
    def from_dict(cls, d):
        """Build from ``{"shape": ..., "delta": ..., "samples": [...]}``."""
        try:
            shape = d["shape"]
            delta = d["delta"]
        except KeyError as exc:
            raise KernelError(f"kernel description missing key {exc}") from None
        if shape == "tabulated":
            return cls.tabulated(d.get("samples") or (), delta)
        if shape == "rescaled":
            raise KernelError("rescaled kernels carry a Python callable and cannot be read from config")
        return cls(delta, shape)

    def to_dict(self):
        d = {"shape": self.shape, "delta": self.delta}
        if self.samples is not None:
            d["samples"] = list(self.samples)
        return d

    # -- evaluation ---------------------------------------------------------
    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        slack = 1e-12 * self.delta
        if np.any(s < -slack) or np.any(s > self.delta + slack):
            raise KernelDomainError(f"kernel evaluated outside [0, {self.delta}]")
        s = np.clip(s, 0.0, self.delta)
        d = self.delta
        if self.shape == "constant":
            out = np.full_like(s, 1.0 / d)
        elif self.shape == "linear":
            out = 2.0 * (d - s) / d**2
        elif self.shape == "rescaled":
            out = self._scale * np.asarray(self.profile(s / d), dtype=float) / d
        else:
            arr = np.asarray(self.samples)
            grid = np.linspace(0.0, d, len(arr))
            out = self._scale * np.interp(s, grid, arr) / d
        return out if out.ndim else float(out)

    def breakpoints(self):
        """Points where the kernel may fail to be smooth (always includes 0 and delta)."""
        if self.shape == "tabulated":
            return np.linspace(0.0, self.delta, len(self.samples))
        return np.array([0.0, self.delta])

    @property
    def satisfies_A3(self):
        return validate_A3(self)


@dataclass(frozen=True)
class KernelMoments:
    nu: float
    mass: float
    w0: float
    wdelta: float


def eval_kernel(spec: KernelSpec, s):
    return spec(s)


def compute_moments(spec: KernelSpec, quad_nodes: int = 1024) -> KernelMoments:
    """First moment nu = int s w(s) ds, zeroth moment and endpoint values."""
    if quad_nodes < 16:
        raise ValueError("quad_nodes must be >= 16")
    s, wq = gauss_panels(spec.breakpoints(), panels_for_nodes(quad_nodes))
    w = spec(s)
    if np.any(w < 0):
        raise KernelError("kernel is negative at a quadrature node")
    mass = float(wq @ w)
    if abs(mass - 1.0) > MASS_TOL:
        raise KernelError(f"kernel mass {mass} deviates from 1")
    nu = float(wq @ (s * w))
    return KernelMoments(nu=nu, mass=mass, w0=float(spec(0.0)), wdelta=float(spec(spec.delta)))


def validate_A3(spec: KernelSpec, samples: int = 256) -> bool:
    """True iff the sampled kernel is non-increasing and non-constant."""
    samples = max(int(samples), 32)
    s = np.linspace(0.0, spec.delta, samples)
    if spec.shape == "tabulated":
        s = np.union1d(s, spec.breakpoints())
    w = spec(s)
    nonincreasing = bool(np.all(np.diff(w) <= _MONOTONE_SLACK))
    nonconstant = bool(w.max() - w.min() > _MONOTONE_SLACK)
    return nonincreasing and nonconstant
