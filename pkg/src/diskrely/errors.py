"""Shared exception types.

Validation problems raise plain ValueError everywhere. The classes below
mark numeric or statistical trouble that callers may want to route
differently; the command line maps them to distinct exit codes.
"""


class ConditioningError(ArithmeticError):
    """A computation lost too much precision or produced non-finite values."""


class DegenerateChainError(ConditioningError):
    """The transient determinant vanished; the chain cannot be solved as posed."""


class AllCensoredError(RuntimeError):
    """Every simulation trial hit the event cap before observing data loss."""
