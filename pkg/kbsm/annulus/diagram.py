"""Arrow diagrams in the annulus, their Kauffman states, and the pipelines
psi_c / phi_beta from diagrams to normal forms.

A diagram is stored as a slice encoding: a number of strands crossing the
radial cut and a sequence of events read around the S^1 direction. Positions
are 1-based from the inner boundary. ``cap i`` opens two new strands at
positions i, i+1; ``cup i`` joins the strands at i, i+1; ``x+ i`` and ``x- i``
cross strands i and i+1; ``a+ i`` and ``a- i`` put an arrow on strand i
pointing forward or backward around S^1.
"""

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

from .exceptions import CrossingLimitExceeded, DiagramError, NotACrossing, ParseError
from .laurent import ONE, A_pow, LaurentPoly
from .polyfam import LambdaPoly, kink_factor, ppoly, ppoly_k, trivial_circle_factor
from .reduce import DEFAULT_FUEL, Reducer
from .words import (
    Annulus,
    FiberedTorus,
    GammaWord,
    ModuleElement,
    ReductionConfig,
)

log = logging.getLogger(__name__)

DEFAULT_CROSSING_CAP = 20

# Weights of the A-smoothing and the A^-1-smoothing in the recursive skein form.
SKEIN_WEIGHTS: tuple[LaurentPoly, LaurentPoly] = (A_pow(1), A_pow(-1))


class EventKind(str, Enum):
    CAP = "cap"
    CUP = "cup"
    CROSS_POS = "x+"
    CROSS_NEG = "x-"
    ARROW_POS = "a+"
    ARROW_NEG = "a-"


@dataclass(frozen=True, order=True)
class Event:
    kind: EventKind
    position: int

    @property
    def is_crossing(self) -> bool:
        return self.kind in (EventKind.CROSS_POS, EventKind.CROSS_NEG)

    @property
    def is_arrow(self) -> bool:
        return self.kind in (EventKind.ARROW_POS, EventKind.ARROW_NEG)

    @property
    def sign(self) -> int:
        """+1 or -1 for arrows and crossings, 0 for caps and cups."""
        if self.kind in (EventKind.CROSS_POS, EventKind.ARROW_POS):
            return 1
        if self.kind in (EventKind.CROSS_NEG, EventKind.ARROW_NEG):
            return -1
        return 0

    @property
    def delta(self) -> int:
        if self.kind is EventKind.CAP:
            return 2
        if self.kind is EventKind.CUP:
            return -2
        return 0

    def moved(self, position: int) -> "Event":
        return Event(self.kind, position)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.position}"


def cap(i: int) -> Event:
    return Event(EventKind.CAP, i)


def cup(i: int) -> Event:
    return Event(EventKind.CUP, i)


def cross_pos(i: int) -> Event:
    return Event(EventKind.CROSS_POS, i)


def cross_neg(i: int) -> Event:
    return Event(EventKind.CROSS_NEG, i)


def arrow(i: int, sign: int = 1) -> Event:
    if sign not in (1, -1):
        raise ValueError(f"Arrow sign must be +1 or -1, got {sign}")
    return Event(EventKind.ARROW_POS if sign > 0 else EventKind.ARROW_NEG, i)


@dataclass(frozen=True)
class SliceDiagram:
    """Slice encoding of an arrow diagram in the annulus.

    Parameters
    ----------
    base_strands : int
        Strands crossing the radial cut; the annular closure glues position j
        at the end to position j at the start.
    events : tuple[Event, ...]
        Events in S^1 order.
    """

    base_strands: int
    events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))

    def strand_counts(self) -> list[int]:
        """Strand count of every slice; entry t sits just before event t."""
        counts = [self.base_strands]
        for ev in self.events:
            counts.append(counts[-1] + ev.delta)
        return counts

    def crossings(self) -> list[int]:
        return [t for t, ev in enumerate(self.events) if ev.is_crossing]

    def splice_events(self, index: int, new: Iterable[Event], remove: int = 0) -> "SliceDiagram":
        """Replace ``remove`` events starting at ``index`` with ``new``."""
        events = self.events[:index] + tuple(new) + self.events[index + remove:]
        return SliceDiagram(self.base_strands, events)

    def check(self) -> None:
        """Raise the first validation error, if any."""
        from .validators import ensure_valid

        ensure_valid(self)

    def __str__(self) -> str:
        return format_diagram(self)


_TOKENS = {kind.value: kind for kind in EventKind}


def parse_diagram(text: str) -> SliceDiagram:
    """Read the line-oriented diagram file format.

    Blank lines and ``#`` comments are ignored. The first remaining line is
    ``strands <k>``; every later line is one event ``<token> <i>`` with token
    one of ``cap cup x+ x- a+ a-``.

    Raises
    ------
    ParseError
        On an unknown token, a missing header or a non-integer argument.
    """
    base: Optional[int] = None
    events: list[Event] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"Expected '<token> <int>', got {line!r}", line=lineno)
        token, value = parts
        try:
            number = int(value)
        except ValueError as e:
            raise ParseError(f"Expected an integer, got {value!r}", line=lineno) from e
        if base is None:
            if token != "strands":
                raise ParseError("Diagram must start with 'strands <k>'", line=lineno)
            base = number
            continue
        if token not in _TOKENS:
            raise ParseError(f"Unknown event {token!r}", line=lineno)
        events.append(Event(_TOKENS[token], number))
    if base is None:
        raise ParseError("Diagram must start with 'strands <k>'", line=1)
    return SliceDiagram(base, tuple(events))


def format_diagram(d: SliceDiagram) -> str:
    lines = [f"strands {d.base_strands}"] + [str(ev) for ev in d.events]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, order=True)
class CircleNode:
    """A trivial circle with its net arrow count and the circles it encloses."""

    net: int
    children: tuple["CircleNode", ...] = ()


@dataclass(frozen=True)
class CrosslessDiagram:
    """Crossingless diagram up to isotopy.

    Parameters
    ----------
    essential : tuple[int, ...]
        Net arrow counts of the essential curves, inner to outer.
    regions : tuple[tuple[CircleNode, ...], ...]
        For each of the ``len(essential) + 1`` annular regions, the sorted
        forest of trivial circles lying in it.
    """

    essential: tuple[int, ...] = ()
    regions: tuple[tuple[CircleNode, ...], ...] = ((),)

    def __post_init__(self) -> None:
        if len(self.regions) != len(self.essential) + 1:
            raise ValueError(
                f"{len(self.essential)} essential curves need {len(self.essential) + 1} regions, "
                f"got {len(self.regions)}"
            )

    def __str__(self) -> str:
        def node(n: CircleNode) -> str:
            inner = " ".join(node(ch) for ch in n.children)
            return f"t{n.net}" + (f"[{inner}]" if inner else "")

        parts = []
        for r, forest in enumerate(self.regions):
            if forest:
                parts.append("(" + " ".join(node(n) for n in forest) + ")")
            if r < len(self.essential):
                parts.append(f"x{self.essential[r]}")
        return " ".join(parts) if parts else "empty"


class StateSum:
    """Finite R-linear combination of crossingless diagrams."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[dict[CrosslessDiagram, LaurentPoly]] = None) -> None:
        self._terms = {cd: c for cd, c in (terms or {}).items() if c}

    def items(self) -> Iterator[tuple[CrosslessDiagram, LaurentPoly]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StateSum):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other: "StateSum") -> "StateSum":
        acc = dict(self._terms)
        for cd, c in other._terms.items():
            acc[cd] = acc[cd] + c if cd in acc else c
        return StateSum(acc)

    def scale(self, r: LaurentPoly) -> "StateSum":
        return StateSum({cd: c * r for cd, c in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{{{c}}}*[{cd}]" for cd, c in sorted(self._terms.items(), key=lambda t: str(t[0])))


@dataclass
class _Curve:
    winding: int
    net: int
    anchor: tuple[int, int]
    slices: dict[int, list[int]] = field(default_factory=dict)

    def below(self, point: tuple[int, int]) -> int:
        t, p = point
        return sum(1 for q in self.slices.get(t, ()) if q < p)


def _trace(base: int, events: Sequence[Event]) -> list[_Curve]:
    """Follow every closed curve of a crossingless slice encoding."""
    if not events:
        return [_Curve(1, 0, (0, p), {0: [p]}) for p in range(1, base + 1)]
    period = len(events)
    edges: list[tuple[tuple[int, int], tuple[int, int], int, int, Optional[tuple[int, int]]]] = []
    adj: dict[tuple[int, int], list[int]] = defaultdict(list)

    def add(a, b, arrow_sign=0, wrap=0, mid=None):
        adj[a].append(len(edges))
        adj[b].append(len(edges))
        edges.append((a, b, arrow_sign, wrap, mid))

    count = base
    for t, ev in enumerate(events):
        i = ev.position
        if ev.kind is EventKind.CAP:
            for p in range(1, count + 1):
                add((t, p), (t + 1, p if p < i else p + 2))
            add((t + 1, i), (t + 1, i + 1), mid=(2 * i + 1, 2 * t + 1))
        elif ev.kind is EventKind.CUP:
            for p in range(1, count + 1):
                if p < i:
                    add((t, p), (t + 1, p))
                elif p > i + 1:
                    add((t, p), (t + 1, p - 2))
            add((t, i), (t, i + 1), mid=(2 * i + 1, 2 * t + 1))
        elif ev.is_arrow:
            for p in range(1, count + 1):
                add((t, p), (t + 1, p), arrow_sign=ev.sign if p == i else 0)
        else:
            raise DiagramError(f"Event {t} ({ev}) is a crossing; smooth it before tracing")
        count += ev.delta
    for p in range(1, base + 1):
        add((period, p), (0, p), wrap=1)

    curves: list[_Curve] = []
    seen: set[tuple[int, int]] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        net = winding = lift = 0
        slices: dict[int, list[int]] = defaultdict(list)
        points: list[tuple[int, int]] = []
        cur, came = start, None
        while True:
            seen.add(cur)
            t, p = cur
            # slice `period` is slice 0 seen from the other side of the cut
            if t < period:
                slices[t].append(p)
            points.append((2 * p, 2 * (t + lift * period)))
            eid = next(e for e in adj[cur] if e != came)
            a, b, arrow_sign, wrap, mid = edges[eid]
            if a == cur:
                nxt, net, winding, lift = b, net + arrow_sign, winding + wrap, lift + wrap
            else:
                nxt, net, winding, lift = a, net - arrow_sign, winding - wrap, lift - wrap
            if mid is not None:
                points.append((mid[0], mid[1] + 2 * lift * period))
            cur, came = nxt, eid
            if cur == start:
                break
        if abs(winding) > 1:
            raise DiagramError(f"Traced curve winds {winding} times around the annulus")
        if winding < 0:
            net = -net
        elif winding == 0:
            area = sum(
                x0 * y1 - x1 * y0
                for (x0, y0), (x1, y1) in zip(points, points[1:] + points[:1])
            )
            # counterclockwise in the drawing means clockwise in (position, time)
            if area > 0:
                net = -net
        curves.append(_Curve(abs(winding), net, start, dict(slices)))
    return curves


def _prune(nodes: Iterable[CircleNode]) -> tuple[tuple[CircleNode, ...], int]:
    """Drop arrowless empty circles, counting them."""
    kept = []
    removed = 0
    for node in nodes:
        children, r = _prune(node.children)
        removed += r
        if node.net == 0 and not children:
            removed += 1
            continue
        kept.append(CircleNode(node.net, children))
    return tuple(sorted(kept)), removed


def _assemble(curves: list[_Curve]) -> CrosslessDiagram:
    essentials = [cv for cv in curves if cv.winding]
    trivials = [cv for cv in curves if not cv.winding]

    def inner_count(cv: _Curve) -> int:
        return sum(1 for other in essentials if other is not cv and other.below(cv.anchor) % 2)

    essentials.sort(key=inner_count)
    region = [sum(1 for e in essentials if e.below(cv.anchor) % 2) for cv in trivials]
    contains = [
        [j != i and trivials[j].below(trivials[i].anchor) % 2 == 1 for j in range(len(trivials))]
        for i in range(len(trivials))
    ]
    depth = [sum(row) for row in contains]
    children: dict[int, list[int]] = defaultdict(list)
    roots: list[int] = []
    for i in range(len(trivials)):
        parents = [j for j in range(len(trivials)) if contains[i][j] and depth[j] == depth[i] - 1]
        if parents:
            children[parents[0]].append(i)
        else:
            roots.append(i)

    def build(i: int) -> CircleNode:
        return CircleNode(trivials[i].net, tuple(sorted(build(ch) for ch in children[i])))

    forests: list[list[CircleNode]] = [[] for _ in range(len(essentials) + 1)]
    for i in roots:
        forests[region[i]].append(build(i))
    return CrosslessDiagram(
        tuple(cv.net for cv in essentials),
        tuple(tuple(sorted(f)) for f in forests),
    )


def crossless_terms(base: int, events: Sequence[Event]) -> tuple[CrosslessDiagram, LaurentPoly]:
    """Trace a crossingless encoding, removing arrowless empty circles.

    Returns
    -------
    tuple[CrosslessDiagram, LaurentPoly]
        The pruned diagram and the factor (-A^2 - A^-2)^removed.
    """
    cd = _assemble(_trace(base, events))
    factor = ONE
    regions = []
    for forest in cd.regions:
        kept, removed = _prune(forest)
        regions.append(kept)
        if removed:
            factor = factor * trivial_circle_factor() ** removed
    return CrosslessDiagram(cd.essential, tuple(regions)), factor


def _smoothing(ev: Event, a_marker: bool) -> tuple[Event, ...]:
    # x+ i: the A-smoothing joins the incoming pair and reopens it
    horizontal = (cup(ev.position), cap(ev.position))
    if (ev.kind is EventKind.CROSS_POS) == a_marker:
        return horizontal
    return ()


def _check_cap(d: SliceDiagram, crossing_cap: int) -> int:
    n = len(d.crossings())
    if n > crossing_cap:
        raise CrossingLimitExceeded(n, crossing_cap)
    return n


def resolve_states(d: SliceDiagram, crossing_cap: int = DEFAULT_CROSSING_CAP) -> StateSum:
    """Kauffman state sum of ``d``.

    Every assignment of A / A^-1 markers to the crossings contributes
    ``A^(p - n)`` times the traced smoothing, where p and n count the two
    marker kinds. Arrowless empty circles are removed with the factor
    -A^2 - A^-2 each.

    Parameters
    ----------
    d : SliceDiagram
        A valid diagram.
    crossing_cap : int, optional
        Largest crossing count accepted. Defaults to 20.

    Returns
    -------
    StateSum
        Map from crossingless diagram to coefficient.

    Raises
    ------
    CrossingLimitExceeded
        If ``d`` has more than ``crossing_cap`` crossings.
    """
    n = _check_cap(d, crossing_cap)
    crossing_at = set(d.crossings())
    acc: dict[CrosslessDiagram, LaurentPoly] = {}
    for markers in itertools.product((True, False), repeat=n):
        marks = iter(markers)
        events: list[Event] = []
        p = 0
        for t, ev in enumerate(d.events):
            if t in crossing_at:
                a_marker = next(marks)
                p += 1 if a_marker else -1
                events.extend(_smoothing(ev, a_marker))
            else:
                events.append(ev)
        cd, factor = crossless_terms(d.base_strands, events)
        weight = factor.shift(p)
        acc[cd] = acc[cd] + weight if cd in acc else weight
    log.debug(f"[states] -- {2 ** n} states -> {len(acc)} diagrams")
    return StateSum(acc)


def skein_triple(d: SliceDiagram, index: int) -> tuple[SliceDiagram, SliceDiagram, SliceDiagram]:
    """Split ``d`` at the crossing event ``index`` into (D+, D0, D_inf).

    D+ is ``d`` itself, D0 its A-smoothing and D_inf its A^-1-smoothing at
    that crossing, so that D+ = A D0 + A^-1 D_inf in the skein module.

    Raises
    ------
    NotACrossing
        If event ``index`` does not exist or is not a crossing.
    """
    if not 0 <= index < len(d.events) or not d.events[index].is_crossing:
        raise NotACrossing(f"Event {index} of the diagram is not a crossing")
    ev = d.events[index]
    d0 = d.splice_events(index, _smoothing(ev, True), remove=1)
    dinf = d.splice_events(index, _smoothing(ev, False), remove=1)
    return d, d0, dinf


def resolve_skein(d: SliceDiagram, crossing_cap: int = DEFAULT_CROSSING_CAP) -> StateSum:
    """Same value as :func:`resolve_states`, by resolving one crossing at a time."""
    _check_cap(d, crossing_cap)
    crossings = d.crossings()
    if not crossings:
        cd, factor = crossless_terms(d.base_strands, d.events)
        return StateSum({cd: factor})
    _, d0, dinf = skein_triple(d, crossings[0])
    w0, winf = SKEIN_WEIGHTS
    return resolve_skein(d0, crossing_cap).scale(w0) + resolve_skein(dinf, crossing_cap).scale(winf)


def _forest_value(forest: Iterable[CircleNode]) -> LambdaPoly:
    total = LambdaPoly.constant(ONE)
    for node in forest:
        total = total * _node_value(node)
    return total


def _node_value(node: CircleNode) -> LambdaPoly:
    if not node.children:
        return ppoly(node.net)
    value = LambdaPoly()
    for j, c in _forest_value(node.children).items():
        value = value + ppoly_k(node.net, j) * c
    return value


def crossless_to_gamma(cd: CrosslessDiagram) -> ModuleElement:
    element = ModuleElement.from_lambda(_forest_value(cd.regions[0]))
    for m, forest in zip(cd.essential, cd.regions[1:]):
        element = element * GammaWord.x(m) * _forest_value(forest)
    return element


def to_gamma(s: StateSum) -> ModuleElement:
    """Expand a state sum into words: x_m per essential curve, R[lambda] values per region."""
    acc = ModuleElement()
    for cd, c in s.items():
        acc = acc + crossless_to_gamma(cd) * c
    return acc


def _pipeline(
    d: SliceDiagram,
    space: ReductionConfig,
    fuel: int,
    crossing_cap: int,
    method: str,
    reducer: Optional[Reducer],
) -> ModuleElement:
    d.check()
    if method == "states":
        states = resolve_states(d, crossing_cap)
    elif method == "skein":
        states = resolve_skein(d, crossing_cap)
    else:
        raise ValueError("method must be 'states' or 'skein'")
    if reducer is None:
        reducer = Reducer(space, fuel)
    return reducer.reduce(to_gamma(states))


def psi_c(
    d: SliceDiagram,
    c: int,
    fuel: int = DEFAULT_FUEL,
    crossing_cap: int = DEFAULT_CROSSING_CAP,
    method: str = "states",
    reducer: Optional[Reducer] = None,
) -> ModuleElement:
    """Normal form of ``d`` in the annulus basis Sigma_c.

    Parameters
    ----------
    d : SliceDiagram
        Diagram to evaluate; validated first.
    c : int
        Basis index.
    fuel : int, optional
        Rule applications allowed per term. Defaults to 1000000.
    crossing_cap : int, optional
        Largest crossing count accepted. Defaults to 20.
    method : str, optional
        ``"states"`` for the full state sum, ``"skein"`` for recursive
        resolution. Defaults to ``"states"``.
    reducer : Optional[Reducer], optional
        Reducer for ``Annulus(c)`` to reuse.

    Returns
    -------
    ModuleElement
        Combination of Sigma_c words.
    """
    return _pipeline(d, Annulus(c), fuel, crossing_cap, method, reducer)


def phi_beta(
    d: SliceDiagram,
    beta: int,
    fuel: int = DEFAULT_FUEL,
    crossing_cap: int = DEFAULT_CROSSING_CAP,
    method: str = "states",
    reducer: Optional[Reducer] = None,
) -> ModuleElement:
    """Normal form of ``d`` in the fibered-torus basis Sigma'_nu, nu = floor(beta / 2)."""
    return _pipeline(d, FiberedTorus(beta), fuel, crossing_cap, method, reducer)


def evaluate(
    d: SliceDiagram,
    space: ReductionConfig,
    fuel: int = DEFAULT_FUEL,
    crossing_cap: int = DEFAULT_CROSSING_CAP,
    method: str = "states",
    reducer: Optional[Reducer] = None,
) -> ModuleElement:
    """Dispatch to :func:`psi_c` or :func:`phi_beta` by space."""
    return _pipeline(d, space, fuel, crossing_cap, method, reducer)


def embed_word(w: GammaWord) -> tuple[SliceDiagram, LaurentPoly]:
    """Draw ``w`` as a crossingless diagram.

    Each x_m is an essential strand with |m| arrows of sign m and each lambda
    a one-arrow circle in its region, so that ``unit * psi(diagram) == w``.

    Returns
    -------
    tuple[SliceDiagram, LaurentPoly]
        The diagram and the unit ``(-A^-3)^(number of lambdas)``.
    """
    events: list[Event] = []
    for r, n in enumerate(w.lambda_exps):
        events.extend([cap(r + 1), arrow(r + 1, 1), cup(r + 1)] * n)
    for j, m in enumerate(w.x_indices, start=1):
        events.extend([arrow(j, 1 if m > 0 else -1)] * abs(m))
    total = sum(w.lambda_exps)
    # each one-arrow circle is a kinked lambda
    return SliceDiagram(w.k, tuple(events)), kink_factor(-1) ** total
