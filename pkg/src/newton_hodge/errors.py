"""Exception types shared across the pipelines."""


class ValidationError(ValueError):
    """Instance data violates the hypotheses needed for the L-function."""


class TrivialCaseError(ValidationError):
    """Single pole of order one: the L-function is identically 1."""


class EnumerationCapError(RuntimeError):
    """A field enumeration would exceed the configured element cap."""


class PrecisionError(ArithmeticError):
    """A p-adic computation ran out of working precision."""
