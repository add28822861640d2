"""Exception hierarchy shared by all modules.

Input/validation problems raise DomainError subclasses (CLI exit code 2);
violated internal invariants raise InternalError (CLI exit code 3).
"""


class FrobdynError(Exception):
    """Base class for all library errors."""


class DomainError(FrobdynError):
    """Invalid input: bad literal, zero element, shape mismatch, non-prime p."""


class NotInSpan(DomainError):
    """Element is not generated by the coprime basis.

    Carries the residual factor that could not be absorbed.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PreconditionViolated(DomainError):
    """An operation's stated precondition does not hold for the input."""


class Unsupported(DomainError):
    """Input is valid but outside the implemented scope (for example
    p-divisible torsion or point arithmetic on non-torus factors)."""


class InternalError(FrobdynError):
    """An internal invariant failed; indicates a bug, not bad input."""
