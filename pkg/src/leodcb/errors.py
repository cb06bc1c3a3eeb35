"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument sits outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A scenario or algorithm configuration violates a named constraint."""


class IllegalActionError(RuntimeError):
    """The environment was asked to connect to an unavailable satellite."""


class StateError(RuntimeError):
    """An operation was called in a state it does not support."""
