"""Exception types shared across the package."""


class FRGSError(Exception):
    """Base class for package errors."""


class HypothesisError(FRGSError):
    """Growth or convexity hypotheses on g fail numerically."""


class DomainError(FRGSError, ValueError):
    """Input outside the domain of an operation (e.g. a zero field)."""


class NumericalError(FRGSError):
    """An iteration failed to bracket or converge."""


class StagnationError(FRGSError):
    """Descent stopped making progress; carries the partial report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FieldFormatError(FRGSError):
    """Malformed field CSV; ``line`` is the 1-based line number."""

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
