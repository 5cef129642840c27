"""Exception hierarchy shared by all pipeline stages."""


class OptomechError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(OptomechError, ValueError):
    """A physical or numerical input is outside its allowed domain."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MissingGeometryError(OptomechError):
    """An operation needs geometry fields that were not supplied."""


class NoPhysicalRootError(OptomechError):
    """The mean-field cubic has no non-negative real root."""


class UnstableDriftError(OptomechError):
    """The drift matrix has an eigenvalue with non-negative real part."""


class SolverSingularityError(OptomechError):
    """A linear system that should be regular is numerically singular."""


class NumericalFailureError(OptomechError):
    """An eigen-solver or other numerical kernel did not converge."""


class DegeneratePivotError(OptomechError):
    """A Routh table pivot vanished (marginal stability)."""


class NumericDomainError(OptomechError, ValueError):
    """A covariance matrix produced an argument outside a function's domain."""


class StepTooLargeError(OptomechError, ValueError):
    """A stochastic integration step violates its resolution bounds."""


class ConfigError(OptomechError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
