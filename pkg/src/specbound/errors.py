"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates the operation's domain (bad modulus, range, shape...)."""


class PreconditionError(ValueError):
    """A verification routine was handed data that breaks its stated contract.

    Distinct from a check *failure*: a precondition error means the question
    was ill-posed, not that the inequality under test is violated.
    """


class ResourceLimitError(RuntimeError):
    """A size guard tripped (grid q**N or spectrum 3**K would exceed the budget)."""


class NumericalError(ArithmeticError):
    """Numerical procedure failed to converge or produced corrupted values."""
