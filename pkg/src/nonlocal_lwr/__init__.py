"""Nonlocal LWR traffic flow on a ring road: solver, spectral stability analysis and oracles."""
from .exceptions import (CFLError, ConfigError, ConsistencyError, FitError, KernelDomainError, KernelError,
                         NumericalFailure, PreconditionError, ResolutionError)
from .kernels import KernelMoments, KernelSpec, compute_moments, eval_kernel, validate_A3
from .field import (DensityField, PeriodicGrid, l2_distance_to_mean, nonlocal_average, nonlocal_gradient)
from .spectral import SpectralReport, evolve_linearized, fourier_coefficients, stability_constant
from .diagnostics import (DiagnosticsSeries, RateFit, energy, fit_rate, is_stagnated, kl_divergence,
                          theoretical_rate_bound)
from .solver import (DesiredSpeed, SimulationRun, SolverConfig, lax_friedrichs_step, max_wave_speed, run)
from .oracles import (LocalLinearSolution, check_hardy_littlewood, check_nonlinear_poincare,
                      check_nonlocal_poincare, local_linear_exact, traveling_wave_exact)

__version__ = "0.1.0"
