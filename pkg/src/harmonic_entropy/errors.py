"""Exception hierarchy shared across the package."""


class HarmonicEntropyError(Exception):
    """Base class for all package errors."""


class SolverError(HarmonicEntropyError):
    """An iterative solver (eigen, bisection) did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularityError(HarmonicEntropyError):
    """A negative power was requested of a (numerically) singular matrix."""

    def __init__(self, message, smallest_eigenvalue=None):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class DomainError(HarmonicEntropyError, ValueError):
    """Argument outside the mathematical domain of a function."""


class AssumptionViolation(HarmonicEntropyError):
    """An oscillator system fails positivity or the uniform norm bound."""


class BipartitionError(HarmonicEntropyError, ValueError):
    """Region is empty, out of range or otherwise not admissible."""


class UncertaintyViolation(HarmonicEntropyError):
    """A symplectic eigenvalue lies below 1 beyond the clamping tolerance."""

    def __init__(self, message, minimum=None):
        super().__init__(message)
        self.minimum = minimum


class ConsistencyError(HarmonicEntropyError):
    """Internal numerical consistency check failed (e.g. eigenvalue pairing)."""


class IntegrationError(HarmonicEntropyError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(HarmonicEntropyError, ValueError):
    """Invalid experiment configuration."""
