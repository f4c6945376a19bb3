"""Exception types raised across the package."""


class KernelError(ValueError):
    """Kernel definition is invalid (negative values, bad normalization, bad horizon)."""


class KernelDomainError(ValueError):
    """Kernel evaluated outside its support [0, delta]."""


class ResolutionError(ValueError):
    """The grid cannot resolve the nonlocal horizon (delta < dx)."""


class CFLError(ValueError):
    """Time step violates the CFL restriction."""


class NumericalFailure(RuntimeError):
    """Non-finite values appeared during time stepping."""


class ConsistencyError(RuntimeError):
    """A computed quantity contradicts a proven property (e.g. alpha <= 0 for an admissible kernel)."""


class PreconditionError(ValueError):
    """Input violates a documented precondition."""


class FitError(ValueError):
    """Not enough usable samples to fit a decay rate."""


class ConfigError(ValueError):
    """Experiment configuration is malformed."""
