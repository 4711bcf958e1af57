"""Shared exception types."""

__all__ = ["PrecisionError", "BudgetError"]


class PrecisionError(ValueError):
    """Raised when a requested digit precision exceeds what the tool supports."""


class BudgetError(RuntimeError):
    """Raised when an enumeration would exceed its configured size budget."""
