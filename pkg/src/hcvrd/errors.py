"""Exception types shared across the package."""


class HcvrdError(Exception):
    """Base class for all package errors."""


class DomainError(HcvrdError, ValueError):
    """An input is outside the mathematical domain of an operation."""


class NotApplicableError(HcvrdError, ValueError):
    """An operation was requested for parameters it is not defined for."""


class ConfigError(HcvrdError, ValueError):
    """A scenario or parameter file is malformed or violates an invariant."""


class SolverError(HcvrdError, RuntimeError):
    """Time integration or root finding failed."""
