"""Exception types shared across the package."""


class UnmlError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(UnmlError, ValueError):
    """An argument fails basic validation (shape, finiteness, range)."""


class InsufficientDataError(InvalidInputError):
    """A computation needs more observations than were provided."""


class SingularCovarianceError(UnmlError):
    """A covariance matrix has a zero eigenvalue where positivity is required."""


class DomainViolationError(UnmlError):
    """A maximum-likelihood estimate falls outside the restricted domain."""


class InfeasibleKError(UnmlError):
    """The requested number of clusters cannot be realized on the data."""


class InvalidAssignmentError(UnmlError):
    """A label sequence violates the assignment contract."""


class DegenerateEstimateError(UnmlError):
    """A Monte Carlo run produced no usable samples."""
