class MultistopError(Exception):
    """Base class for errors raised by this package."""


class InvalidInputError(MultistopError, ValueError):
    """An argument violates a documented precondition."""


class BudgetExceededError(MultistopError):
    """A brute-force computation would exceed its configured size budget."""
