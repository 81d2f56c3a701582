"""Validation functions for diagrams and calculator parameters."""

from typing import Optional, Union

from .diagram import EventKind, SliceDiagram
from .exceptions import DiagramError, EventOutOfRange, StrandCountMismatch
from .words import Annulus, FiberedTorus, ReductionConfig

VALID_SPACES = ["annulus", "fibered"]
VALID_SUITES = ["polys", "annulus", "torus", "diagram", "all"]
VALID_FAMILIES = ["Q", "P"]


def validate_diagram(d: SliceDiagram) -> list[DiagramError]:
    """Check the strand-count invariants of a slice diagram.

    Parameters
    ----------
    d : SliceDiagram
        Diagram to check.

    Returns
    -------
    list[DiagramError]
        Empty when ``d`` is well formed; otherwise the first offending event,
        followed by a closure mismatch if the final count is also wrong.
    """
    errors: list[DiagramError] = []
    if d.base_strands < 0:
        return [StrandCountMismatch(f"base_strands must be non-negative, got {d.base_strands}")]

    count = d.base_strands
    for idx, ev in enumerate(d.events):
        i = ev.position
        # Every event needs its strands to exist in the incoming slice
        if ev.kind is EventKind.CUP and count < 2:
            return [StrandCountMismatch(f"Event {idx} ({ev}) removes strands below zero", idx)]
        if ev.kind is EventKind.CAP:
            top = count + 1
        elif ev.is_arrow:
            top = count
        else:
            top = count - 1
        if not 1 <= i <= top:
            return [EventOutOfRange(f"Event {idx} ({ev}) needs position in 1..{top}, {count} strands", idx)]
        count += ev.delta

    # Closure glues the last slice onto the first
    if count != d.base_strands:
        errors.append(StrandCountMismatch(
            f"Final strand count {count} differs from base_strands {d.base_strands}", len(d.events)
        ))
    return errors


def ensure_valid(d: SliceDiagram) -> SliceDiagram:
    """Return ``d`` unchanged, or raise its first validation error."""
    errors = validate_diagram(d)
    if errors:
        raise errors[0]
    return d


def validate_space(space: str, c: Optional[int] = None, beta: Optional[int] = None) -> ReductionConfig:
    """Build the reduction space named on the command line.

    Parameters
    ----------
    space : str
        ``"annulus"`` or ``"fibered"``.
    c : Optional[int], optional
        Basis index, required for the annulus.
    beta : Optional[int], optional
        Fibering parameter, required for the fibered torus.

    Raises
    ------
    ValueError
        If the space is unknown or its parameter is missing.
    """
    if space not in VALID_SPACES:
        raise ValueError(f"space must be one of {VALID_SPACES}, got '{space}'")
    if space == "annulus":
        if c is None:
            raise ValueError("The annulus space requires c")
        return Annulus(c)
    if beta is None:
        raise ValueError("The fibered space requires beta")
    return FiberedTorus(beta)


def validate_positive_int(name: str, value: Union[int, str]) -> int:
    """Coerce ``value`` to a positive integer, naming ``name`` on failure."""
    try:
        number = int(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"{name} must be a positive integer, got '{value}'") from e
    if number <= 0:
        raise ValueError(f"{name} must be a positive integer, got {number}")
    return number


def parse_range(text: str) -> list[int]:
    """Read ``"A..B"`` (inclusive) or a single integer ``"A"``.

    An empty range such as ``"3..2"`` gives an empty list.

    Raises
    ------
    ValueError
        If either bound is not an integer.
    """
    lo_text, sep, hi_text = text.partition("..")
    try:
        lo = int(lo_text)
        hi = int(hi_text) if sep else lo
    except ValueError as e:
        raise ValueError(f"Range must look like 'A..B' or 'A', got '{text}'") from e
    return list(range(lo, hi + 1))


def validate_suite(suite: str) -> str:
    if suite not in VALID_SUITES:
        raise ValueError(f"suite must be one of {VALID_SUITES}, got '{suite}'")
    return suite


def validate_family(family: str) -> str:
    if family not in VALID_FAMILIES:
        raise ValueError(f"family must be one of {VALID_FAMILIES}, got '{family}'")
    return family
