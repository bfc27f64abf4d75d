"""Exception types shared across the equilibrium engine."""


class DomainError(ValueError):
    """An argument is outside the domain a routine is defined on."""


class NumericError(RuntimeError):
    """A numeric routine failed to converge or found an inconsistent bracket.

    Carries the last bracket state in ``bracket`` when available.
    """

    def __init__(self, message: str, bracket: tuple | None = None):
        super().__init__(message if bracket is None else f"{message} (bracket={bracket})")
        self.bracket = bracket


class ConsistencyError(RuntimeError):
    """Two redundant computations of the same quantity disagree."""


class ConfigError(ValueError):
    """A run configuration is malformed; ``field`` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
