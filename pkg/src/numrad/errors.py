"""Exception types shared across the package."""


class NumradError(Exception):
    """Base class for every error raised by this package."""


class NotSquareError(NumradError):
    """A square matrix was required."""


class NotHermitianError(NumradError):
    """Input failed the Hermitian pre-check."""


class ConvergenceError(NumradError):
    """An iterative decomposition did not meet its residual target."""


class NegativeSpectrumError(NumradError):
    """A nominally PSD matrix has an eigenvalue below the clamping floor."""


class InvalidFunctionError(NumradError):
    """A scalar function returned NaN or a negative value on the spectrum."""


class DimensionMismatchError(NumradError):
    """Operand shapes are incompatible."""


class OutOfRangeError(NumradError):
    """A scalar parameter violates its admissible range."""


class ToleranceUnreachableError(NumradError):
    """The eigendecomposition budget was exhausted before certification."""


class EmptyListError(NumradError):
    """A nonempty operator list was required."""


class DimensionTooLargeError(NumradError):
    """Brute-force enumeration is restricted to tiny dimensions."""


class ShapeUnsupportedError(NumradError):
    """The requested shape is not supported by this ensemble kind."""


class NotContractionError(NumradError):
    """An operator exceeded spectral norm 1 where a contraction was required."""


class NotNormalError(NumradError):
    """A normal operator was required."""


class UnknownBoundError(NumradError):
    """Unrecognized bound identifier."""


class MatrixFileError(NumradError):
    """A matrix file could not be parsed."""
