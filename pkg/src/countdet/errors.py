class CountdetError(Exception):
    """Base class for toolkit errors."""


class RegexSyntaxError(CountdetError, ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class NonMonadicCounting(CountdetError, ValueError):
    """A bounded repetition is applied to something other than a character class."""


class NotMonadic(CountdetError, ValueError):
    """A CA violates one of the structural conditions of monadic CAs."""

    def __init__(self, item: int, message: str):
        super().__init__(f"item {item}: {message}")
        self.item = item


class BoundViolation(CountdetError, RuntimeError):
    """A simulated counter exceeded the automaton's declared maximum."""


class StuckUnexpected(CountdetError, RuntimeError):
    """A deterministic run found no enabled transition from a non-empty sphere."""


class BudgetExceeded(CountdetError, RuntimeError):
    """Base for all resource-limit failures."""


class StateBudgetExceeded(BudgetExceeded):
    pass


class PartitionBudgetExceeded(BudgetExceeded):
    pass


class Diverged(BudgetExceeded):
    """The non-terminating sphere construction used up its sphere budget."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class Timeout(BudgetExceeded):
    pass
