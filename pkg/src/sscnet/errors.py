"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Raised when matrix dimensions do not fit an operation."""


class BudgetError(RuntimeError):
    """Raised when an enumeration would exceed its size budget."""

    def __init__(self, count, budget):
        super().__init__(f"enumeration of {count} realizations exceeds budget {budget}")
        self.count = count
        self.budget = budget


class ClassificationError(ValueError):
    """Raised when a node system cannot be classified (fails the standing hypothesis)."""


class ParseError(ValueError):
    """Raised on malformed pattern, node, or network input."""
