"""Exception types raised across the package."""


class GrassfaultError(Exception):
    """Base class for all package errors."""


class ParameterError(GrassfaultError, ValueError):
    """Invalid argument or configuration value."""


class DimensionError(GrassfaultError, ValueError):
    """Array shapes do not agree."""


class DataFormatError(GrassfaultError, ValueError):
    """A dataset file is missing, malformed or holds invalid values."""


class UnknownLabelError(DataFormatError):
    """A label string is not one of the known fault classes."""


class NumericalError(GrassfaultError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class RankDeficiencyError(NumericalError):
    """Requested dimension exceeds the numerical rank of the data."""


class ConditioningError(NumericalError):
    """A matrix that must be inverted is too badly conditioned."""


class ConvergenceError(NumericalError):
    """An iterative solver stopped before meeting its tolerance."""
