"""Exception types shared across the toolkit."""


class SmoothProgError(Exception):
    """Base class for toolkit errors."""


class CapacityError(SmoothProgError, MemoryError):
    """A request exceeds the configured memory budget."""


class RangeError(SmoothProgError, ValueError):
    """An argument lies outside the range covered by a table or evaluator."""


class DomainError(SmoothProgError, ValueError):
    """A function was called outside its mathematical domain."""


class NumericalError(SmoothProgError, ArithmeticError):
    """A numerical procedure failed to converge or lost its accuracy budget."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConfigError(SmoothProgError, ValueError):
    """Invalid experiment configuration."""
