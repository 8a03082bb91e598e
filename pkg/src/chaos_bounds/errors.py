"""Exception types shared across the package."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured resource budget.

    ``projected`` carries the size that triggered the refusal (term count,
    diagram count, or number of sign vectors) when it is known.
    """

    def __init__(self, message, projected=None):
        super().__init__(message)
        self.projected = projected


class FormatError(ValueError):
    """An input document (form or kernel JSON) is malformed."""
