"""Exception types shared across the library.

All numeric-contract violations derive from ValueError so callers that do
not care about the fine-grained kind can catch a single class. ConfigError
is reserved for malformed user input (CLI / JSON configs) and maps to a
different process exit code than numeric failures.
"""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes or subsystem dimensions."""


class NotHermitianError(ValueError):
    """Matrix deviates from its adjoint beyond tolerance."""


class NotPositiveError(ValueError):
    """Matrix has an eigenvalue below the allowed negative tolerance."""


class SupportViolationError(ValueError):
    """A state carries weight outside the support of its reference."""


class UndefinedWeightError(ValueError):
    """Requested a mixture weight at an index where it is singular."""


class RankDeficientError(ValueError):
    """Reference mixture is not full rank, so its log does not exist."""


class BudgetExceededError(ValueError):
    """A tensor-power dimension would exceed the configured memory budget."""

    def __init__(self, required: int, allowed: int, what: str = "dimension"):
        self.required = required
        self.allowed = allowed
        super().__init__(
            f"{what} {required} exceeds configured budget {allowed} "
            f"(raise ALGOCAP_BUDGET_DIM to allow)"
        )


class ConfigError(ValueError):
    """Invalid run configuration; carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
