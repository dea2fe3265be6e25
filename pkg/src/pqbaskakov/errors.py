"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EvaluationError(RuntimeError):
    """A function handle produced a non-finite or undefined value."""


class ConfigurationError(ValueError):
    """A schedule or policy is internally inconsistent (e.g. q_n >= p_n)."""
