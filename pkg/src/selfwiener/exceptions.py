"""Exception hierarchy.

Every error raised by the package derives from :class:`SelfWienerError`, and
each subclass also derives from the closest builtin so that generic
``except ValueError`` handlers keep working.
"""


class SelfWienerError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SelfWienerError, ValueError):
    """Non-finite samples, bad parameter values, unknown options."""


class DimensionError(SelfWienerError, ValueError):
    """Arrays whose lengths or shapes are inconsistent."""


class SymmetryError(SelfWienerError, ValueError):
    """A spectrum expected to be conjugate-symmetric is not."""


class SingularFilterError(SelfWienerError, ArithmeticError):
    """The filter response vanishes at a bin where a value is required."""

    def __init__(self, message, bin_index=None):
        super().__init__(message)
        self.bin_index = bin_index


class DegenerateDataError(SelfWienerError, ArithmeticError):
    """Data without spread, e.g. a zero median absolute deviation."""


class NoDecisionError(SelfWienerError, RuntimeError):
    """An iteration exhausted its budget without converging or diverging."""
