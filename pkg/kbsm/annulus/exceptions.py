"""Exceptions raised by the skein module calculator."""

from typing import Optional


class ParseError(ValueError):
    """Malformed polynomial, expression or diagram text.

    Parameters
    ----------
    message : str
        What went wrong.
    position : int, optional
        Character offset of the offending token. Defaults to 0.
    line : Optional[int], optional
        1-based line number, for diagram files. Defaults to None.
    """

    def __init__(self, message: str, position: int = 0, line: Optional[int] = None) -> None:
        self.position = position
        self.line = line
        where = f"line {line}" if line is not None else f"position {position}"
        super().__init__(f"{message} at {where}")


class ReductionError(RuntimeError):
    """A normal-form reduction could not complete."""


class FuelExhausted(ReductionError):
    """The rule-application budget ran out before reaching a normal form."""

    def __init__(self, fuel: int, word: str) -> None:
        self.fuel = fuel
        self.word = word
        super().__init__(f"Fuel of {fuel} rule applications exhausted while reducing {word}")


class CycleDetected(ReductionError):
    """A word's reduction recursively requires itself."""

    def __init__(self, word: str) -> None:
        self.word = word
        super().__init__(f"Reduction of {word} requires itself")


class DiagramError(ValueError):
    """Base class for invalid slice diagrams and inapplicable diagram edits."""


class StrandCountMismatch(DiagramError):
    def __init__(self, message: str, index: Optional[int] = None) -> None:
        self.index = index
        super().__init__(message)


class EventOutOfRange(DiagramError):
    def __init__(self, message: str, index: Optional[int] = None) -> None:
        self.index = index
        super().__init__(message)


class CrossingLimitExceeded(DiagramError):
    def __init__(self, crossings: int, cap: int) -> None:
        self.crossings = crossings
        self.cap = cap
        super().__init__(f"Diagram has {crossings} crossings, above the cap of {cap}")


class MoveNotApplicable(DiagramError):
    pass


class NotACrossing(DiagramError):
    pass
