"""Exception hierarchy.

Every error raised by the library derives from :class:`IsospecError`; the
class name is what the command line reports in its error payload.
"""
from __future__ import annotations


class IsospecError(Exception):
    """Base class for all library errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# field W -------------------------------------------------------------------

class ZeroDenominator(IsospecError, ZeroDivisionError):
    pass


class DivisionByZeroElement(IsospecError, ZeroDivisionError):
    pass


class UndefinedDegree(IsospecError, ValueError):
    pass


class PoleAtPoint(IsospecError, ZeroDivisionError):
    pass


class BothZero(IsospecError, ValueError):
    pass


class ZeroPolynomial(IsospecError, ValueError):
    pass


class ParseError(IsospecError, ValueError):
    """Malformed weight expression.

    ``position`` is the 0-based character offset of the offending token and
    ``expected`` the set of token kinds that would have been accepted there.
    """

    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        self.position = position
        self.expected = frozenset(expected)
        detail = f"{message} at position {position}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


# graphs --------------------------------------------------------------------

class DuplicateEdge(IsospecError, ValueError):
    pass


class ZeroWeightEdge(IsospecError, ValueError):
    pass


class BadIndex(IsospecError, IndexError):
    pass


class EmptySet(IsospecError, ValueError):
    pass


class NotStructural(IsospecError, ValueError):
    pass


class NotSt0(NotStructural):
    pass


class NotInGpi(IsospecError, ValueError):
    pass


class EmptyGraph(IsospecError, ValueError):
    pass


class EmptyTarget(IsospecError, ValueError):
    pass


# reductions ----------------------------------------------------------------

class InteriorLoopEqualsLambda(IsospecError, ValueError):
    pass


class ComplementNotTriangulable(IsospecError, ValueError):
    pass


class SingularDiagonal(IsospecError, ValueError):
    pass


class NotNested(IsospecError, ValueError):
    pass


class StepNotStructural(IsospecError, ValueError):
    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(message)


# spectra -------------------------------------------------------------------

class NonFinite(IsospecError, ValueError):
    pass


class CrossCheckDisagreement(IsospecError, ArithmeticError):
    pass


# expansions ----------------------------------------------------------------

class UncoveredVertex(IsospecError, ValueError):
    pass


class SizeMismatch(IsospecError, ValueError):
    pass


class TooLarge(IsospecError, ValueError):
    pass


# dynamical networks --------------------------------------------------------

class MissingLipschitz(IsospecError, ValueError):
    pass


class NonDifferentiableComponent(IsospecError, ValueError):
    pass


class DomainEscape(IsospecError, ArithmeticError):
    def __init__(self, message: str, step: int, coordinate: int):
        self.step = step
        self.coordinate = coordinate
        super().__init__(message)


class BadInitialState(IsospecError, ValueError):
    pass


# documents -----------------------------------------------------------------

class DocumentError(IsospecError, ValueError):
    """Malformed graph or interaction file."""
