class InvalidInputError(ValueError):
    """Argument shapes or values violate an operation's preconditions."""


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


class NumericError(ArithmeticError):
    """A loss, gradient or parameter vector became non-finite."""


class EmptyBufferError(RuntimeError):
    """Sampling was requested from a replay buffer with no transitions."""
