"""Exception types shared across the package."""


class MimodistError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(MimodistError, ValueError):
    """Input has the wrong shape, an empty dimension, or is not Hermitian."""


class NotPSDError(MimodistError, ValueError):
    """A matrix required to be positive semi-definite has a genuinely
    negative eigenvalue (below the relative tolerance)."""


class NumericalError(MimodistError, ArithmeticError):
    """A factorization or solve failed.

    ``pivot`` is the zero-based index of the failing Cholesky pivot when
    the failure came from a non-positive-definite matrix, else None.
    """

    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class DegenerateCombinerError(MimodistError, ValueError):
    """A combining vector came out identically zero for some UE.

    ``ue`` is the zero-based index of the offending UE.
    """

    def __init__(self, message, ue=None):
        super().__init__(message)
        self.ue = ue


class ConfigError(MimodistError, ValueError):
    """Invalid configuration value or malformed config file."""
