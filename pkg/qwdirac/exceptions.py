"""
Exceptions for the quantum walk / Dirac toolkit
"""

from typing import Optional


class QWDiracError(Exception):
    """Base class for all qwdirac errors"""


class DomainError(QWDiracError, ValueError):
    """A precondition or invariant of an operation is violated"""


class ConvergenceError(QWDiracError, ArithmeticError):
    """A quadrature or grid computation did not reach its tolerance"""

    def __init__(self, message: str, estimate: Optional[float] = None, error: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


__all__ = ["QWDiracError", "DomainError", "ConvergenceError"]
