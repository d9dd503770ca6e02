"""Error taxonomy shared across the library.

The CLI maps these onto exit codes: ParameterError (and subclasses) and
DomainError mean a precondition was violated by the inputs; an
InvariantViolationError means a mathematical guarantee failed at runtime,
which indicates a bug rather than bad input.
"""


class ParameterError(ValueError):
    """An argument violates an operation's stated precondition."""


class OutOfRangeError(ParameterError):
    """An index exceeds the range a table or function is defined on."""


class DomainError(ParameterError):
    """Inputs are outside the mathematical domain of the operation."""


class ClassViolationError(ParameterError):
    """A prime-power rule produced a value of modulus greater than 1."""


class InvariantViolationError(RuntimeError):
    """A proven inequality or exact identity failed numerically."""
