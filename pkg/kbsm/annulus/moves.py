"""Local moves on slice diagrams that preserve the skein class."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .diagram import (
    Event,
    EventKind,
    SliceDiagram,
    arrow,
    cap,
    cross_neg,
    cross_pos,
    cup,
)
from .exceptions import MoveNotApplicable

log = logging.getLogger(__name__)


class Move(str, Enum):
    FRAMED_KINK_PAIR = "kink-pair"
    R2 = "r2"
    R3 = "r3"
    ARROW_CANCEL = "arrow-cancel"
    ARROW_SLIDE = "arrow-slide"
    EVENT_COMMUTE = "commute"


@dataclass(frozen=True)
class Site:
    """Where a move acts.

    Parameters
    ----------
    index : int
        Event index (0-based) where the move starts; for insertions, the
        slice before which events are inserted.
    position : int, optional
        Strand position used by insertions. Defaults to 1.
    inverse : bool, optional
        Run the move in its other direction. Defaults to False.
    """

    index: int
    position: int = 1
    inverse: bool = False


def kink_pair(i: int) -> tuple[Event, ...]:
    """Positive then negative kink on the strand at position ``i``."""
    return (cap(i), cross_pos(i), cup(i + 1), cap(i), cross_neg(i), cup(i + 1))


def _events_at(d: SliceDiagram, index: int, n: int) -> tuple[Event, ...]:
    if index < 0 or index + n > len(d.events):
        raise MoveNotApplicable(f"Need {n} events at index {index}, diagram has {len(d.events)}")
    return d.events[index:index + n]


def _strands_at(d: SliceDiagram, index: int) -> int:
    counts = d.strand_counts()
    if not 0 <= index < len(counts):
        raise MoveNotApplicable(f"No slice {index} in a diagram with {len(d.events)} events")
    return counts[index]


def _insert(d: SliceDiagram, site: Site, events: tuple[Event, ...], width: int) -> SliceDiagram:
    count = _strands_at(d, site.index)
    if not 1 <= site.position or site.position + width - 1 > count:
        raise MoveNotApplicable(
            f"Position {site.position} needs {width} strands, slice {site.index} has {count}"
        )
    return d.splice_events(site.index, events)


def _r2(d: SliceDiagram, site: Site) -> SliceDiagram:
    if not site.inverse:
        return _insert(d, site, (cross_pos(site.position), cross_neg(site.position)), 2)
    first, second = _events_at(d, site.index, 2)
    if not (first.is_crossing and second.is_crossing) or first.position != second.position \
            or first.kind is second.kind:
        raise MoveNotApplicable(f"Events {first}, {second} are not an opposite crossing pair")
    return d.splice_events(site.index, (), remove=2)


def _kink_pair(d: SliceDiagram, site: Site) -> SliceDiagram:
    if not site.inverse:
        return _insert(d, site, kink_pair(site.position), 1)
    window = _events_at(d, site.index, 6)
    if window != kink_pair(window[0].position):
        raise MoveNotApplicable(f"No kink pair at event {site.index}")
    return d.splice_events(site.index, (), remove=6)


def _r3(d: SliceDiagram, site: Site) -> SliceDiagram:
    a, b, c = _events_at(d, site.index, 3)
    if not (a.is_crossing and a.kind is b.kind is c.kind and a.position == c.position
            and abs(a.position - b.position) == 1):
        raise MoveNotApplicable(f"Events {a}, {b}, {c} are not a braid triple")
    return d.splice_events(site.index, (b, a, b), remove=3)


def _arrow_cancel(d: SliceDiagram, site: Site) -> SliceDiagram:
    if site.inverse:
        return _insert(d, site, (arrow(site.position, 1), arrow(site.position, -1)), 1)
    a, b = _events_at(d, site.index, 2)
    if not (a.is_arrow and b.is_arrow and a.position == b.position and a.sign == -b.sign):
        raise MoveNotApplicable(f"Events {a}, {b} are not opposite arrows on one strand")
    return d.splice_events(site.index, (), remove=2)


def _arrow_slide(d: SliceDiagram, site: Site) -> SliceDiagram:
    """Move an arrow across the turning point of a cap or cup next to it."""
    ev, = _events_at(d, site.index, 1)
    if not ev.is_arrow:
        raise MoveNotApplicable(f"Event {site.index} ({ev}) is not an arrow")
    neighbours = []
    if site.index > 0 and d.events[site.index - 1].kind is EventKind.CAP:
        neighbours.append(d.events[site.index - 1])
    if site.index + 1 < len(d.events) and d.events[site.index + 1].kind is EventKind.CUP:
        neighbours.append(d.events[site.index + 1])
    for turn in neighbours:
        if ev.position in (turn.position, turn.position + 1):
            other = turn.position + 1 if ev.position == turn.position else turn.position
            # the other arm runs the opposite way in time
            return d.splice_events(site.index, (arrow(other, -ev.sign),), remove=1)
    raise MoveNotApplicable(f"Arrow at event {site.index} is not on a cap or cup arm")


def _span_in(ev: Event) -> tuple[int, int]:
    """Strands of the incoming slice an event touches, as a half-open range."""
    if ev.kind is EventKind.CAP:
        return ev.position, ev.position
    return ev.position, ev.position + (1 if ev.is_arrow else 2)


def _span_out(ev: Event) -> tuple[int, int]:
    if ev.kind is EventKind.CUP:
        return ev.position, ev.position
    return ev.position, ev.position + (1 if ev.is_arrow else 2)


def commute(first: Event, second: Event) -> Optional[tuple[Event, Event]]:
    """Swap two adjacent events on disjoint strands, or None if they interact.

    Positions are renumbered across the caps and cups involved, so the
    picture only changes by a planar isotopy.
    """
    lo_f, hi_f = _span_out(first)
    lo_s, hi_s = _span_in(second)
    if lo_f == hi_f == lo_s == hi_s:
        return None
    if hi_s <= lo_f:
        return second, first.moved(first.position + second.delta)
    if lo_s >= hi_f:
        return second.moved(second.position - first.delta), first
    return None


def _event_commute(d: SliceDiagram, site: Site) -> SliceDiagram:
    a, b = _events_at(d, site.index, 2)
    swapped = commute(a, b)
    if swapped is None:
        raise MoveNotApplicable(f"Events {a} and {b} share strands")
    return d.splice_events(site.index, swapped, remove=2)


_MOVES = {
    Move.FRAMED_KINK_PAIR: _kink_pair,
    Move.R2: _r2,
    Move.R3: _r3,
    Move.ARROW_CANCEL: _arrow_cancel,
    Move.ARROW_SLIDE: _arrow_slide,
    Move.EVENT_COMMUTE: _event_commute,
}


def apply_move(d: SliceDiagram, move: Move, site: Site) -> SliceDiagram:
    """Apply ``move`` at ``site``.

    Parameters
    ----------
    d : SliceDiagram
        A valid diagram.
    move : Move
        Which move.
    site : Site
        Where, and in which direction.

    Returns
    -------
    SliceDiagram
        A diagram with the same skein class as ``d``.

    Raises
    ------
    MoveNotApplicable
        If the events at ``site`` do not have the shape the move needs.
    """
    result = _MOVES[Move(move)](d, site)
    log.debug(f"[move {Move(move).value}] -- at {site.index}: {len(d.events)} -> {len(result.events)} events")
    return result


def _inserts(move: Move, inverse: bool) -> bool:
    if move in (Move.FRAMED_KINK_PAIR, Move.R2):
        return not inverse
    return move is Move.ARROW_CANCEL and inverse


def applicable_sites(d: SliceDiagram, move: Move) -> list[Site]:
    """Every site where ``move`` applies to ``d``, in index order."""
    move = Move(move)
    directions = (False, True) if move in (Move.FRAMED_KINK_PAIR, Move.R2, Move.ARROW_CANCEL) else (False,)
    sites = []
    for index, count in enumerate(d.strand_counts()):
        for inverse in directions:
            positions = range(1, count + 1) if _inserts(move, inverse) else (1,)
            for position in positions:
                site = Site(index, position, inverse)
                try:
                    _MOVES[move](d, site)
                except MoveNotApplicable:
                    continue
                sites.append(site)
    return sites
