"""Exception hierarchy shared by all lrmimo modules."""


class LrMimoError(Exception):
    """Base class for all lrmimo errors."""


class ValidationError(LrMimoError, ValueError):
    """Malformed or out-of-contract input (shapes, ranges, non-finite values)."""


class SingularMatrixError(LrMimoError):
    """Numerically rank-deficient matrix where full column rank is required."""


class BudgetExceededError(LrMimoError):
    """An enumeration exceeded its dimension or node budget."""
