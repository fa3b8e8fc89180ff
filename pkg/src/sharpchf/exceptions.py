"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateDistributionError(ValueError):
    """A distribution cannot be standardized (zero variance)."""


class PreconditionError(ValueError):
    """A distribution does not satisfy a check's standing assumptions."""
