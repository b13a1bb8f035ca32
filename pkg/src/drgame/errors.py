"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a model function."""


class ContractError(ValueError):
    """A value object handed to an operation violates its invariants."""


class NumericError(ArithmeticError):
    """A computation produced a non-finite value."""

    def __init__(self, message: str, prices: tuple[float, ...] | None = None):
        super().__init__(message)
        self.prices = prices


class ScenarioError(ValueError):
    """A scenario document could not be parsed or failed validation.

    ``issues`` carries every problem found, not just the first one.
    """

    def __init__(self, message: str, issues: list[str] | None = None):
        self.issues = list(issues or [])
        if self.issues:
            message = message + "\n" + "\n".join(f"  - {i}" for i in self.issues)
        super().__init__(message)
