"""Exception hierarchy shared by every module."""


class HypercountError(Exception):
    """Base class for all errors raised by hypercount."""


class DomainError(HypercountError, ValueError):
    """Parameters fall outside the domain of an operation."""


class BudgetExceeded(HypercountError):
    """An exhaustive computation would exceed its configured budget."""


class UnsupportedArity(DomainError):
    """The operation is only defined for a particular number of classes."""


class NumericalInstability(HypercountError):
    """A floating point result failed its integrality or residual check."""


class NonIntegralResult(HypercountError):
    """An exact rational computation that must be integral was not."""


class RetriesExhausted(HypercountError):
    """A rejection sampler ran out of attempts."""


class InvalidSwitching(HypercountError):
    """A switching does not satisfy its side conditions for the configuration."""


class HypothesisViolated(DomainError):
    """Inputs fail a hypothesis of the summation bounds."""


class CheckFailed(HypercountError):
    """A verification clause did not hold."""

    def __init__(self, clause, detail=""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}" if detail else clause)


class RegimeWarning(UserWarning):
    """A formula was evaluated outside the parameter range it is meant for."""
