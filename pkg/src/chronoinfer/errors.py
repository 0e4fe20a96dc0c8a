"""Exception types shared across the package."""


class ChronoError(Exception):
    """Base class for all errors raised by chronoinfer."""


class DomainError(ChronoError, ValueError):
    """An input lies outside the domain of the operation (t <= 0, b == 0, NaN...)."""


class SingularDesignError(ChronoError, ValueError):
    """The regression design matrix is rank deficient."""


class GridMismatchError(ChronoError, ValueError):
    """Two transients that must share a sample grid do not."""


class EmptyGridError(ChronoError, ValueError):
    """A requested duration or window contains no samples."""


class FormatError(ChronoError, ValueError):
    """A data or configuration file could not be parsed."""
