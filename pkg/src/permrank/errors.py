class BudgetExceededError(ValueError):
    """A computation would exceed its configured enumeration or size budget."""


class MatrixFormatError(ValueError):
    """Malformed matrix text input."""
