"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for all cvcat errors."""


class UsageError(EngineError, ValueError):
    """An operation was called with structurally invalid arguments
    (mismatched mode sets, wrong dimensions, degenerate parameters)."""


class DomainError(EngineError, ValueError):
    """Parameters are outside the mathematically valid domain
    (non-integrable exponent, zero state, insufficient grid coverage)."""


class CapacityError(EngineError, RuntimeError):
    """A configured resource bound (polynomial degree cap) was exceeded."""
