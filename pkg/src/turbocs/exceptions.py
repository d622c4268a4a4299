"""Exception types shared across the library."""


class TurboCSError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(TurboCSError, ValueError):
    """Operand shapes are incompatible."""


class DegenerateMatrixError(TurboCSError, ArithmeticError):
    """A matrix required to be invertible / positive definite is not."""


class ConfigurationError(TurboCSError, ValueError):
    """A problem or benchmark configuration is invalid."""


class NoInformationError(TurboCSError, ArithmeticError):
    """Unbiasing is impossible: the biased variance is not smaller than the
    input variance.  Callers fall back to the biased quantities."""


class StabilityError(TurboCSError, ValueError):
    """A series-expansion step size lies outside the stable region."""
