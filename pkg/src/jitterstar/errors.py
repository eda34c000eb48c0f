"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceGuardError(RuntimeError):
    """A computation would exceed its configured work budget."""
