"""Exception and warning types shared across the package.

The CLI maps these onto its exit-code contract: configuration problems
exit 2, numerical failures exit 3, and convergence warnings exit 4 under
``--strict``.
"""


class StaticRepError(Exception):
    """Base class for all package errors."""


class DomainError(StaticRepError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConfigError(StaticRepError, ValueError):
    """Invalid or inconsistent run configuration."""


class RangeError(StaticRepError, ValueError):
    """A query point lies outside the strike grid."""


class UnsupportedConfigError(StaticRepError, ValueError):
    """A parameter combination the implementation deliberately rejects."""


class NumericError(StaticRepError, RuntimeError):
    """Base class for numerical failures."""


class AccuracyError(NumericError):
    """Quadrature exhausted its subdivision budget with the tolerance unmet.

    Carries the best available estimate so callers can decide whether to
    proceed anyway.
    """

    def __init__(self, message, best_estimate=None, error_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class IterationError(NumericError):
    """An iterative scheme failed to converge within its budget."""


class ConditioningError(NumericError):
    """A linear system is numerically singular."""

    def __init__(self, message, condition_estimate=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class ConvergenceWarning(UserWarning):
    """Strike iteration stopped on the iteration budget, not the tolerance."""


class ConditioningWarning(UserWarning):
    """A linear system is poorly conditioned but still solvable."""
