"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation.

    ``field`` names the offending input when there is a single culprit, so
    front ends can point at it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnsupportedMethodError(DomainError):
    """A truncation method was requested for a family it cannot handle."""


class ResourceError(RuntimeError):
    """A computation would exceed the configured term cap."""


class ConsistencyError(AssertionError):
    """A closed-form result landed outside its proven range."""
