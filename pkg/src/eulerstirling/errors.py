"""Exception types shared across the package."""


class DomainError(ValueError):
    """An object or argument lies outside the domain of an operation."""


class EnumerationBoundError(RuntimeError):
    """Exhaustive enumeration requested beyond the configured size bound."""


class ContextMismatchError(ValueError):
    """Two series built over different contexts were combined."""


class PoleError(ZeroDivisionError):
    """A specialization or inversion hit a pole (vanishing unit part)."""


class ValuationError(ArithmeticError):
    """A valuation claim failed or a Laurent budget was exceeded.

    ``index`` carries the offending summation index when raised by
    :func:`eulerstirling.series.bounded_sum`.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PrecisionError(ArithmeticError):
    """A truncated result is not exact over the requested caps."""
