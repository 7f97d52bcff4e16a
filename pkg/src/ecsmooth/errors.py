"""Exception types shared across the package."""


class EcsmoothError(Exception):
    """Base class for all package-specific errors."""


class UsageError(EcsmoothError):
    """Invalid arguments (mismatched moduli, bad parameters, unknown names)."""


class DomainError(EcsmoothError):
    """Numeric input outside the supported domain."""


class CapacityError(EcsmoothError):
    """A budget or memory guard was exceeded."""


class RamifiedPrimeError(EcsmoothError):
    """Prime divides the field discriminant; caller must handle separately."""


class BadReductionError(EcsmoothError):
    """Prime divides the curve discriminant."""


class AmbiguityError(EcsmoothError):
    """A randomized order computation could not isolate a unique answer."""
