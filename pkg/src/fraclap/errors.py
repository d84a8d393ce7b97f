"""Exception types shared across the toolkit.

Domain errors signal parameter values outside the supported range (bad s,
unsupported dimension).  Precondition errors signal a field that does not meet
the regularity or integrability requirements of an operator.  Budget
exhaustion inside quadrature does not raise; it returns a result flagged
``converged=False`` carrying the best estimate.
"""


class FraclapError(Exception):
    pass


class DomainError(FraclapError, ValueError):
    """Parameter outside the supported range (s, dimension, radius...)."""


class PreconditionError(FraclapError, ValueError):
    """Input field violates an operator precondition (regularity, growth)."""


class UsageError(FraclapError, ValueError):
    """Malformed request: bad config document, unknown field name, bad shapes."""


class ConvergenceFailure(FraclapError, RuntimeError):
    """Raised only where no partial result can be returned (e.g. rejection
    sampling that never accepts).  Carries the best estimate when one exists."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
