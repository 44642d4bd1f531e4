"""Exception types shared across the package."""


class LinsyncError(Exception):
    """Base class for all linsync errors."""


class ValidityError(LinsyncError):
    """An operation was invoked outside its domain of validity.

    Typically raised when the spectral radius of the centered coupling
    matrix is >= 1, so the analytic series and recurrences diverge.
    """


class MatrixFormatError(LinsyncError):
    """A matrix file could not be parsed.

    Carries the 1-based line number at which parsing failed.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AmbiguousZeroModeError(LinsyncError):
    """Two distinct eigenpairs both match the uniform mode direction."""


class EigensolverError(LinsyncError):
    """The dense eigensolver failed to converge."""


class SimulationRefusedError(LinsyncError):
    """Simulation refused because the dynamics would diverge."""


class InternalAccuracyError(LinsyncError):
    """A numerically computed quantity failed an internal sanity bound."""
