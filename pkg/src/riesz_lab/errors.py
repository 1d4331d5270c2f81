"""Exception hierarchy shared by all modules.

Each class carries the process exit code used by the command line runner.
"""


class RieszLabError(Exception):
    exit_code = 1


class InvalidArgument(RieszLabError, ValueError):
    """Bad input values, malformed descriptors or configs."""

    exit_code = 2


class PreconditionViolation(InvalidArgument):
    """Inputs are well-formed but the operation is not defined for them."""


class NumericalFailure(RieszLabError, ArithmeticError):
    exit_code = 3


class BudgetExceeded(RieszLabError):
    """The Weyl estimate of the eigenvalue count is larger than the configured cap."""

    exit_code = 4

    def __init__(self, estimate, cap):
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            f"estimated eigenvalue count {estimate:.4g} (Weyl estimate) exceeds budget {cap:.4g}"
        )
