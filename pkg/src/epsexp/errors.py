"""Exception hierarchy shared by every module."""

from __future__ import annotations


class EpsExpError(Exception):
    """Base class for all library errors."""


class InputError(EpsExpError, ValueError):
    """The problem statement itself is invalid."""


class NumericalError(EpsExpError, ArithmeticError):
    """A well-posed problem could not be evaluated numerically."""


class BackendMismatch(InputError, TypeError):
    pass


class DivisionByZero(NumericalError, ZeroDivisionError):
    pass


class ParseError(InputError):
    pass


class PiNotExact(InputError):
    pass


class OutOfRange(InputError, IndexError):
    pass


class PoleAtBeta(NumericalError):
    """A reciprocal Pochhammer symbol was requested at one of its poles."""


class PoleAtEps(NumericalError):
    """A lower parameter hits a pole at the chosen value of eps."""


class UnresolvablePole(InputError):
    """A lower parameter is a nonpositive integer that eps does not move."""


class DivergentSeries(NumericalError):
    pass


class TruncationNotConverged(NumericalError):
    def __init__(self, message: str, m_used: int | None = None):
        super().__init__(message)
        self.m_used = m_used
