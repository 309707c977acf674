"""Exception hierarchy."""


class GrothLhvError(Exception):
    """Base class for all package errors."""


class InvalidArgument(GrothLhvError, ValueError):
    pass


class ResourceLimitError(GrothLhvError):
    """A computation would exceed a configurable size cap."""


class DegenerateInequality(GrothLhvError, ValueError):
    pass


class InconsistentCorrelation(GrothLhvError, ValueError):
    """Correlation data that implies a negative outcome probability."""


class OutOfRange(GrothLhvError, ValueError):
    pass


class TheoremViolation(GrothLhvError):
    """A computational check contradicted a proven statement (an implementation bug)."""
