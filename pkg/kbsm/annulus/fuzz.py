"""Seeded random words and diagrams, and the differential fuzz harness.

Three kinds of case rotate through a run: reduction-strategy confluence on a
random word, state sum against recursive skein resolution on a random
diagram, and pipeline invariance under a random move. Every mismatch is kept
as a replayable text file.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np
import pandas as pd

from .diagram import (
    DEFAULT_CROSSING_CAP,
    Event,
    EventKind,
    SliceDiagram,
    cap,
    cup,
    evaluate,
    format_diagram,
    resolve_skein,
    resolve_states,
)
from .exceptions import DiagramError, ReductionError
from .moves import Move, Site, applicable_sites, apply_move
from .reduce import DEFAULT_FUEL, Reducer, Strategy
from .words import Annulus, FiberedTorus, GammaWord, ReductionConfig

log = logging.getLogger(__name__)

DEFAULT_SPACES: tuple[ReductionConfig, ...] = (
    Annulus(-2), Annulus(0), Annulus(3), FiberedTorus(3), FiberedTorus(5), FiberedTorus(7),
)
FUZZ_KINDS = ("confluence", "oracle", "move")
DEFAULT_MAX_CROSSINGS = 10
# a thousand cases of each kind per default space
DEFAULT_FUZZ_CASES = 1000 * len(FUZZ_KINDS) * len(DEFAULT_SPACES)


def random_word(
    rng: np.random.Generator,
    anchor: int = 0,
    max_k: int = 6,
    spread: int = 8,
    max_run: int = 5,
) -> GammaWord:
    """Draw a word with up to ``max_k`` x-generators.

    Indices lie within ``spread`` of ``anchor`` and lambda-runs are at most
    ``max_run``.
    """
    k = int(rng.integers(0, max_k + 1))
    xs = tuple(int(anchor + d) for d in rng.integers(-spread, spread + 1, size=k))
    runs = tuple(int(n) for n in rng.integers(0, max_run + 1, size=k + 1))
    return GammaWord(runs, xs)


def random_diagram(
    rng: np.random.Generator,
    max_base: int = 3,
    max_events: int = 20,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
    max_strands: int = 6,
) -> SliceDiagram:
    """Draw a valid diagram; trailing caps or cups restore the base strand count."""
    base = int(rng.integers(0, max_base + 1))
    count, crossings = base, 0
    events: list[Event] = []
    for _ in range(int(rng.integers(0, max_events + 1))):
        options = []
        if count + 2 <= max_strands:
            options.append(EventKind.CAP)
        if count >= 2:
            options.append(EventKind.CUP)
            if crossings < max_crossings:
                options += [EventKind.CROSS_POS, EventKind.CROSS_NEG]
        if count >= 1:
            options += [EventKind.ARROW_POS, EventKind.ARROW_NEG]
        kind = options[int(rng.integers(len(options)))]
        if kind is EventKind.CAP:
            top = count + 1
        elif kind in (EventKind.ARROW_POS, EventKind.ARROW_NEG):
            top = count
        else:
            top = count - 1
        ev = Event(kind, int(rng.integers(1, top + 1)))
        events.append(ev)
        count += ev.delta
        crossings += ev.is_crossing
    while count > base:
        events.append(cup(int(rng.integers(1, count))))
        count -= 2
    while count < base:
        events.append(cap(int(rng.integers(1, count + 2))))
        count += 2
    return SliceDiagram(base, tuple(events))


def random_move(rng: np.random.Generator, d: SliceDiagram) -> Optional[tuple[Move, Site]]:
    """Pick a move and one of its sites at random; None if no move applies."""
    moves = list(Move)
    for i in rng.permutation(len(moves)):
        sites = applicable_sites(d, moves[int(i)])
        if sites:
            return moves[int(i)], sites[int(rng.integers(len(sites)))]
    return None


@dataclass
class FuzzFailure:
    case: int
    kind: str
    space: str
    detail: str
    body: str

    def render(self) -> str:
        """File content; the trailing body replays through ``kbsm reduce --in``."""
        header = [f"# kind {self.kind}", f"# space {self.space}"]
        header += [f"# {line}" for line in self.detail.splitlines()]
        return "\n".join(header) + "\n" + self.body


@dataclass
class FuzzReport:
    cases: int = 0
    counts: dict[str, int] = field(default_factory=dict)
    failures: list[FuzzFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(f.case, f.kind, f.space, f.detail.splitlines()[0]) for f in self.failures],
            columns=["case", "kind", "space", "detail"],
        )

    def write_corpus(self, out_dir: Union[str, Path]) -> list[Path]:
        if not self.failures:
            return []
        root = Path(out_dir)
        root.mkdir(parents=True, exist_ok=True)
        paths = []
        for f in self.failures:
            path = root / f"case-{f.case:05d}-{f.kind}.txt"
            path.write_text(f.render())
            paths.append(path)
        return paths


class _Harness:
    def __init__(self, rng: np.random.Generator, fuel: int, crossing_cap: int, max_crossings: int) -> None:
        self.rng = rng
        self.fuel = fuel
        self.crossing_cap = crossing_cap
        self.max_crossings = max_crossings
        self._reducers: dict[tuple[ReductionConfig, Strategy], Reducer] = {}
        # replayable text of the current case
        self.body = ""

    def reducer(self, space: ReductionConfig, strategy: Strategy = Strategy.RIGHT_ANCHORED) -> Reducer:
        key = (space, strategy)
        if key not in self._reducers:
            self._reducers[key] = Reducer(space, self.fuel, strategy)
        return self._reducers[key]

    def confluence(self, space: ReductionConfig) -> Optional[str]:
        w = random_word(self.rng, space.anchor)
        self.body = str(w)
        right = self.reducer(space).reduce(w)
        left = self.reducer(space, Strategy.LEFTMOST_INNERMOST).reduce(w)
        if right == left:
            return None
        return f"right={right}\nleftmost={left}"

    def oracle(self, space: ReductionConfig) -> Optional[str]:
        d = random_diagram(self.rng, max_crossings=self.max_crossings)
        self.body = format_diagram(d)
        states = resolve_states(d, self.crossing_cap)
        skein = resolve_skein(d, self.crossing_cap)
        if states == skein:
            return None
        return f"states={states}\nskein={skein}"

    def move(self, space: ReductionConfig) -> Optional[str]:
        d = random_diagram(self.rng, max_crossings=self.max_crossings)
        self.body = format_diagram(d)
        picked = random_move(self.rng, d)
        if picked is None:
            return None
        move, site = picked
        moved = apply_move(d, move, site)
        reducer = self.reducer(space)
        before = evaluate(d, space, self.fuel, self.crossing_cap, reducer=reducer)
        after = evaluate(moved, space, self.fuel, self.crossing_cap, reducer=reducer)
        if before == after:
            return None
        return (
            f"move {move.value} at index={site.index} position={site.position} inverse={site.inverse}\n"
            f"before={before}\nafter={after}"
        )


def run_fuzz(
    cases: int,
    seed: int = 0,
    spaces: Optional[Iterable[ReductionConfig]] = None,
    fuel: int = DEFAULT_FUEL,
    crossing_cap: int = DEFAULT_CROSSING_CAP,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
) -> FuzzReport:
    """Run ``cases`` seeded fuzz cases.

    Parameters
    ----------
    cases : int
        Number of cases; kinds rotate confluence, oracle, move, and each kind
        cycles through the spaces in order.
    seed : int, optional
        Seed for ``numpy.random.default_rng``. Defaults to 0.
    spaces : Optional[Iterable[ReductionConfig]], optional
        Spaces to draw from. Defaults to annuli c in {-2, 0, 3} and fibered
        tori beta in {3, 5, 7}.
    fuel : int, optional
        Rule applications allowed per term.
    crossing_cap : int, optional
        State-sum crossing cap.
    max_crossings : int, optional
        Most crossings in a generated diagram. Defaults to 10.

    Returns
    -------
    FuzzReport
        Case counts per kind and every failure found.
    """
    rng = np.random.default_rng(seed)
    pool = list(spaces or DEFAULT_SPACES)
    harness = _Harness(rng, fuel, crossing_cap, max_crossings)
    report = FuzzReport(cases=cases)
    for case in range(cases):
        kind = FUZZ_KINDS[case % len(FUZZ_KINDS)]
        space = pool[(case // len(FUZZ_KINDS)) % len(pool)]
        report.counts[kind] = report.counts.get(kind, 0) + 1
        try:
            detail = getattr(harness, kind)(space)
        except (ReductionError, DiagramError) as e:
            detail = f"{type(e).__name__}: {e}"
        if detail is not None:
            log.debug(f"[fuzz] -- case {case} ({kind}, {space}) failed")
            report.failures.append(FuzzFailure(case, kind, str(space), detail, harness.body))
    log.debug(f"[fuzz] -- {cases} cases, {len(report.failures)} failures")
    return report
