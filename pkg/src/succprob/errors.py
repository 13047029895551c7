"""Exception types shared across the package.

Domain errors mean the caller violated a documented precondition and carry a
machine-readable ``code`` alongside the human-readable message.  Numerical
errors mean the inputs were legal but a computation could not be completed
reliably (non-convergence, overflow, resource caps).
"""

from __future__ import annotations

__all__ = ["SuccprobError", "DomainError", "NumericalError"]


class SuccprobError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SuccprobError, ValueError):
    """An input violates a documented precondition.

    Parameters
    ----------
    code : str
        Stable machine-readable identifier, e.g. ``"t_out_of_range"``.
    message : str
        The violated precondition, stated in plain language.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class NumericalError(SuccprobError, ArithmeticError):
    """A computation on legal inputs could not be completed reliably."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message
