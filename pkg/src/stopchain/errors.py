"""Exception hierarchy.

Computation failures (exit code 1 in the CLI) derive from ComputationError;
malformed inputs (exit code 2) derive from SpecError.
"""


class StopchainError(Exception):
    pass


class ComputationError(StopchainError):
    pass


class DomainError(ComputationError):
    """A state outside the chain's domain was referenced."""


class BudgetExceededError(ComputationError):
    """A computation would materialize more states than the configured budget."""

    def __init__(self, message, budget):
        super().__init__(f"{message} (state budget: {budget})")
        self.budget = budget


class UnsupportedRuleError(ComputationError):
    """The stopping rule has no finite auxiliary memory, so exact DP is impossible."""


class RecurrenceWithinWindowError(ComputationError):
    """(I - P_S) is singular: no mass escapes the window from some state."""


class SpecError(StopchainError):
    """A serialized spec (chain, rule, measure, ...) failed validation."""
