"""Exception types raised by fdrthresh.

All library errors derive from :class:`FdrThreshError` so callers can catch
one base class.  Errors that signal invalid argument values also derive from
``ValueError`` to play well with generic numeric code.
"""

from __future__ import annotations


class FdrThreshError(Exception):
    """Base class for all fdrthresh errors."""


class DomainError(FdrThreshError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """A target value lies outside the range of an invertible map."""


class LevelError(DomainError):
    """A testing level alpha is outside its admissible interval."""


class CalibrationError(FdrThreshError, ValueError):
    """No model parameter attains the requested power/sparsity pair."""


class SolverError(FdrThreshError, ArithmeticError):
    """A bracketing or root-finding step failed to converge."""


class CapacityError(FdrThreshError):
    """The request exceeds a documented size cap (e.g. exact risk for huge m)."""
