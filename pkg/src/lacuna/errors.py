"""Exception hierarchy for the lacuna package.

Every error raised by the library derives from LacunaError so callers can
catch the whole family at once.  Precondition violations that the contracts
do not name explicitly raise plain ValueError.
"""

from __future__ import annotations


class LacunaError(Exception):
    """Base class for all library errors."""


class ParseError(LacunaError):
    """Malformed polynomial text.  Carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NegativeExponent(LacunaError):
    """An exponent below zero was supplied or written after '^'."""


class WrongVariable(ParseError):
    """A variable name outside x1..xn (or its aliases) was used."""


class ArityMismatch(LacunaError):
    """Operands disagree on the number of variables."""


class GuardExceeded(LacunaError):
    """A size guard would be exceeded; never truncated silently."""

    def __init__(self, message: str, instance=None):
        super().__init__(message)
        self.instance = instance


class ZeroPolynomial(LacunaError):
    """The zero polynomial is not a valid input here."""


class MonomialInput(LacunaError):
    """A single-term polynomial is not a valid input here."""


class TooFewTerms(LacunaError):
    """At least two terms are required."""


class UnsupportedArity(LacunaError):
    """The operation is not implemented for this variable count."""


class ZeroVector(LacunaError):
    """The all-zero vector has no direction."""


class NotUnidimensional(LacunaError):
    """The support is not contained in a single line."""


class DirectionMismatch(LacunaError):
    """The support is collinear, but along a different direction."""


class NotLiftable(LacunaError):
    """Constants and monomials have no unidimensional lifting."""


class EngineLimitation(LacunaError):
    """The univariate factor engine cannot handle this instance.

    Raised instead of returning an incomplete factor list; carries the
    offending polynomial when available.
    """

    def __init__(self, message: str, instance=None):
        super().__init__(message)
        self.instance = instance


class EqualValuations(LacunaError):
    """A bipartition needs two distinct valuations."""


class ParallelDirections(LacunaError):
    """Two parallel edge directions define no valuation pair."""


class BadIndex(LacunaError):
    """Variable index outside 1..n."""


class BadModulus(LacunaError):
    """No usable sample could be drawn modulo the chosen primes."""
