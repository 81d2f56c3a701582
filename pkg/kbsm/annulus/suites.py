"""Identity suites run by ``kbsm verify``.

Each suite checks families of skein identities exactly over parameter grids
and reports, per identity, how many instances ran and how many failed.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import numpy as np
import pandas as pd

from .diagram import (
    DEFAULT_CROSSING_CAP,
    SliceDiagram,
    cap,
    cup,
    embed_word,
    evaluate,
    resolve_skein,
    resolve_states,
    skein_triple,
)
from .exceptions import DiagramError, ReductionError
from .fuzz import random_diagram, random_move, random_word
from .laurent import A_pow
from .moves import apply_move
from .polyfam import LAMBDA, ppoly, ppoly_by_recursion, ppoly_k, qpoly
from .reduce import DEFAULT_FUEL, Reducer, check_identity, rebase
from .words import (
    EMPTY_WORD,
    Annulus,
    FiberedTorus,
    GammaWord,
    ModuleElement,
    ReductionConfig,
)

log = logging.getLogger(__name__)

REPORT_COLUMNS = ["suite", "identity", "instances", "failures", "passed"]


@dataclass(frozen=True)
class Grid:
    """Parameter grids for the suites.

    ``n_values`` and ``k_values`` replace each identity's primary index grid
    and its secondary grid when given; an empty tuple runs nothing. ``cases``
    is the number of random words per space for the normal-form contract and
    ``diagrams`` the number of random diagrams for the diagram suite.
    """

    n_values: Optional[tuple[int, ...]] = None
    k_values: Optional[tuple[int, ...]] = None
    c_values: tuple[int, ...] = (-2, 0, 3)
    beta_values: tuple[int, ...] = (3, 5, 7)
    cases: int = 3400
    diagrams: int = 1200
    seed: int = 0
    fuel: int = DEFAULT_FUEL
    crossing_cap: int = DEFAULT_CROSSING_CAP

    def ns(self, default: Iterable[int]) -> tuple[int, ...]:
        return tuple(default) if self.n_values is None else self.n_values

    def ks(self, default: Iterable[int]) -> tuple[int, ...]:
        return tuple(default) if self.k_values is None else self.k_values


@dataclass
class IdentityResult:
    suite: str
    identity: str
    instances: int = 0
    failures: int = 0
    first_failure: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, detail: Callable[[], str]) -> None:
        self.instances += 1
        if not ok:
            self.failures += 1
            if not self.first_failure:
                self.first_failure = detail()
                log.debug(f"[verify {self.suite}] -- {self.identity} failed: {self.first_failure}")


@dataclass
class _Tally:
    suite: str
    results: dict[str, IdentityResult] = field(default_factory=dict)

    def __getitem__(self, identity: str) -> IdentityResult:
        if identity not in self.results:
            self.results[identity] = IdentityResult(self.suite, identity)
        return self.results[identity]

    def check(self, identity: str, params: str, lhs, rhs, reducer: Reducer) -> None:
        try:
            result = check_identity(lhs, rhs, reducer.space, reducer)
        except ReductionError as e:
            self[identity].record(False, lambda: f"{params}: {e}")
            return
        self[identity].record(result.passed, lambda: f"{params}: {result.report()}")


def _x(m: int) -> ModuleElement:
    return ModuleElement.from_word(GammaWord.x(m))


def _xs(m: int, k: int) -> ModuleElement:
    return ModuleElement.from_word(GammaWord((0,) * (k + 1), (m,) * k))


def _lam(n: int) -> ModuleElement:
    return ModuleElement.from_word(GammaWord.lam(n))


def _poly(p) -> ModuleElement:
    return ModuleElement.from_lambda(p)


def ambient_pool(anchor: int) -> list[ModuleElement]:
    """Words used to wrap identities: 1, l^2, x_c, x_{c+1} l, x_c x_c."""
    return [
        ModuleElement.from_word(EMPTY_WORD),
        _lam(2),
        _x(anchor),
        _x(anchor + 1) * _lam(1),
        _xs(anchor, 2),
    ]


def ambient_pairs(anchor: int) -> list[tuple[ModuleElement, ModuleElement]]:
    """A fixed spread of (inner, outer) wrappers from the pool."""
    pool = ambient_pool(anchor)
    return [(pool[0], pool[0]), (pool[1], pool[0]), (pool[0], pool[2]),
            (pool[2], pool[3]), (pool[3], pool[1]), (pool[4], pool[4])]


def sigma_c_words(c: int, max_n: int = 4, max_k: int = 4) -> Iterator[GammaWord]:
    for n in range(max_n + 1):
        yield GammaWord.lam(n)
        for k in range(max_k + 1):
            for head in (c, c + 1):
                yield GammaWord((0, n) + (0,) * k, (head,) + (c,) * k)


def sigma_prime_words(nu: int, max_n: int = 6) -> Iterator[GammaWord]:
    for n in range(max_n + 1):
        yield GammaWord.lam(n)
        yield GammaWord((0, n), (nu,))


def polys_suite(grid: Grid) -> list[IdentityResult]:
    """Recursions and closed forms of the Q and P families."""
    tally = _Tally("polys")
    a, a2, ai = A_pow(1), A_pow(2), A_pow(-1)
    for n in grid.ns(range(-12, 13)):
        lhs = ppoly(n) - LAMBDA * ppoly(n - 1) * a + ppoly(n - 2) * a2
        tally["P three-term recursion"].record(lhs.is_zero(), lambda: f"n={n}: {lhs}")
        tally["P closed form matches recursion"].record(
            ppoly(n) == ppoly_by_recursion(n),
            lambda: f"n={n}: {ppoly(n)} != {ppoly_by_recursion(n)}",
        )
    for n in grid.ns(range(-10, 11)):
        for k in grid.ks(range(1, 9)):
            if k < 1:
                continue
            two_sided = ppoly_k(n + 1, k - 1) * a + ppoly_k(n - 1, k - 1) * ai
            tally["P_{n,k} nesting recursion"].record(
                ppoly_k(n, k) == two_sided, lambda: f"n={n} k={k}"
            )
            shifted = LAMBDA * ppoly_k(n - 1, k) * a - ppoly_k(n - 2, k) * a2
            tally["P_{n,k} three-term recursion"].record(
                ppoly_k(n, k) == shifted, lambda: f"n={n} k={k}"
            )
    for n in grid.ns(range(1, 16)):
        if n < 1:
            continue
        tally["Q antisymmetry"].record(qpoly(-n) == -qpoly(n), lambda: f"n={n}")
        q = qpoly(n)
        tally["Q degree and leading coefficient"].record(
            q.degree() == n - 1 and q.leading() == 1,
            lambda: f"n={n}: degree {q.degree()}, leading {q.leading()}",
        )
    return list(tally.results.values())


def _shift_identities(anchor: int, grid: Grid, pairs) -> Iterator[tuple[str, str, ModuleElement, ModuleElement]]:
    """Moving lambda across x_m and re-indexing x_m through Q."""
    for off in grid.ns(range(-4, 5)):
        m = anchor + off
        for w1, w2 in pairs:
            params = f"m={m} w1={w1} w2={w2}"
            yield "lambda left of x", params, w1 * _x(m) * w2, \
                w1 * (_lam(1) * _x(m + 1) * A_pow(1) - _x(m + 2) * A_pow(2)) * w2
            yield "lambda right of x", params, w1 * _x(m) * w2, \
                w1 * (_x(m - 1) * _lam(1) * A_pow(1) - _x(m - 2) * A_pow(2)) * w2
    for off in grid.ns(range(-4, 5)):
        m = anchor + off
        for koff in grid.ns(range(-4, 5)):
            k = anchor + koff
            after = (
                _x(k) * _poly(qpoly(m - k - 1)) * A_pow(m - k, -1)
                + _x(k + 1) * _poly(qpoly(m - k)) * A_pow(m - k - 1)
            )
            before = (
                _poly(qpoly(m - k - 1)) * _x(k) * A_pow(k - m, -1)
                + _poly(qpoly(m - k)) * _x(k + 1) * A_pow(k - m + 1)
            )
            for w1, w2 in pairs:
                params = f"m={m} k={k} w1={w1} w2={w2}"
                yield "x index shift, Q after", params, w1 * _x(m) * w2, w1 * after * w2
                yield "x index shift, Q before", params, w1 * _x(m) * w2, w1 * before * w2


def _exchange_identities(c: int, grid: Grid, pairs) -> Iterator[tuple[str, str, ModuleElement, ModuleElement]]:
    """Arrow circles and lambda-runs passing essential curves."""
    zero = ModuleElement()
    for m in grid.ns(range(-5, 6)):
        for n in grid.ns(range(-5, 6)):
            for k in grid.ks(range(0, 5)):
                if k < 0:
                    continue
                exchange_after = (
                    _lam(k) * _x(m + n) * A_pow(1)
                    + _x(m) * _poly(ppoly_k(n, k)) * A_pow(-1)
                    - _x(m - 1) * _poly(ppoly_k(n - 1, k)) * A_pow(1)
                    - _lam(k) * _x(m + n - 2) * A_pow(-1)
                )
                exchange_before = (
                    _poly(ppoly_k(n, k)) * _x(m) * A_pow(1)
                    + _x(m - n) * _lam(k) * A_pow(-1)
                    - _x(m - n - 2) * _lam(k) * A_pow(1)
                    - _poly(ppoly_k(n + 1, k)) * _x(m - 1) * A_pow(-1)
                )
                merge = (
                    _poly(ppoly_k(n - m, k)) * A_pow(1)
                    + _x(m) * _lam(k) * _x(n) * A_pow(-1)
                    - _x(m - 1) * _lam(k) * _x(n + 1) * A_pow(1)
                    - _poly(ppoly_k(n - m + 2, k)) * A_pow(-1)
                )
                for w1, w2 in pairs:
                    params = f"m={m} n={n} k={k} w1={w1} w2={w2}"
                    yield "x_m P_{n,k} exchange", params, w1 * exchange_after * w2, zero
                    yield "P_{n,k} x_m exchange", params, w1 * exchange_before * w2, zero
                    yield "x_m l^k x_n merge", params, w1 * merge * w2, zero
    pool = ambient_pool(c)
    for off in grid.ns(range(-4, 5)):
        m = c + off
        for k in grid.ks(range(0, 5)):
            if k < 0:
                continue
            lhs = _poly(ppoly(c - m)) * _x(c + 1) * _xs(c, k)
            rhs = (
                _poly(ppoly(c - m + 1)) * _xs(c, k + 1) * A_pow(-2)
                - _x(m + 1) * _xs(c, k) * A_pow(-2)
                + _x(m - 1) * _xs(c, k)
            )
            for w1 in pool:
                yield "P_{c-m} x_{c+1} tail", f"m={m} k={k} w1={w1}", w1 * lhs, w1 * rhs


def _torus_identities(nu: int, grid: Grid, pool) -> Iterator[tuple[str, str, ModuleElement, ModuleElement]]:
    """Consequences of sliding over the filling disk."""
    zero = ModuleElement()
    n_values = [n for n in grid.ns(range(0, 5)) if n >= 0]
    for n in n_values:
        for k in grid.ks(range(0, 4)):
            if k < 0:
                continue
            params = f"n={n} k={k}"
            tail = _xs(nu, k)
            yield "x_{nu+1} lowering", params, \
                _x(nu + 1) * _lam(n) * tail, _x(nu) * _lam(n) * tail * A_pow(3, -1)
            yield "x_{nu+1} pair", params, \
                _x(nu + 1) * _lam(n) * _x(nu + 1) * tail, \
                _x(nu) * _lam(n) * _x(nu + 1) * tail * A_pow(3, -1)
            if k >= 1:
                shorter = _xs(nu, k - 1)
                yield "x_nu x_nu collapse", params, _x(nu) * _lam(n) * tail, \
                    _poly(ppoly_k(-1, n)) * shorter * A_pow(-1) - _poly(ppoly_k(0, n)) * shorter * A_pow(-2)
                yield "t_{0,n} expansion", params, _poly(ppoly_k(0, n)) * shorter, \
                    _poly(ppoly_k(-1, n)) * shorter * A_pow(1) + _x(nu + 1) * _lam(n) * tail * A_pow(-1)
    for off in grid.ns(range(-4, 5)):
        m = nu + off
        for n in n_values:
            for w in pool:
                params = f"m={m} n={n} w={w}"
                yield "P_{m,n} handle slide", params, (
                    _poly(ppoly_k(m, n)) * w
                    - _poly(ppoly_k(m - 1, n)) * w * A_pow(1)
                    - _x(nu + 1) * _lam(n) * _x(m + nu) * w * A_pow(-1)
                ), zero
                yield "l^n x_m handle slide", params, (
                    _lam(n) * _x(m) * w
                    - _lam(n) * _x(m + 1) * w * A_pow(1)
                    - _x(nu + 1) * _poly(ppoly_k(m - nu, n)) * w * A_pow(-1)
                ), zero


def _normal_form_contract(tally: _Tally, reducer: Reducer, grid: Grid, rng: np.random.Generator) -> None:
    space = reducer.space
    for _ in range(grid.cases):
        w = random_word(rng, space.anchor)
        try:
            nf = reducer.reduce(w)
            ok = nf.supported_on(space.in_basis) and reducer.reduce(nf) == nf
        except ReductionError:
            ok = False
        tally["normal form is idempotent and in basis"].record(ok, lambda: f"{space}: {w}")


def annulus_suite(grid: Grid) -> list[IdentityResult]:
    """Relations of the annulus engine for each c, plus basis changes."""
    tally = _Tally("annulus")
    rng = np.random.default_rng(grid.seed)
    reducers = {c: Reducer(Annulus(c), grid.fuel) for c in grid.c_values}
    for c, reducer in reducers.items():
        pairs = ambient_pairs(c)
        for identity, params, lhs, rhs in _shift_identities(c, grid, pairs):
            tally.check(identity, f"c={c} {params}", lhs, rhs, reducer)
        for identity, params, lhs, rhs in _exchange_identities(c, grid, pairs):
            tally.check(identity, f"c={c} {params}", lhs, rhs, reducer)
        _normal_form_contract(tally, reducer, grid, rng)
        for c2 in (c - 3, c + 3):
            other = reducers.get(c2) or Reducer(Annulus(c2), grid.fuel)
            for w in sigma_c_words(c):
                e = ModuleElement.from_word(w)
                try:
                    back = rebase(rebase(e, c, c2, reducer=other), c2, c, reducer=reducer)
                except ReductionError:
                    back = None
                tally["basis change round trip"].record(back == e, lambda: f"{w}: c={c} via {c2} -> {back}")
    return list(tally.results.values())


def torus_suite(grid: Grid) -> list[IdentityResult]:
    """Torus relations for each beta, plus the annulus relations read in the torus."""
    tally = _Tally("torus")
    rng = np.random.default_rng(grid.seed)
    for beta in grid.beta_values:
        reducer = Reducer(FiberedTorus(beta), grid.fuel)
        nu = reducer.space.anchor
        pool = ambient_pool(nu)
        for identity, params, lhs, rhs in _torus_identities(nu, grid, pool):
            tally.check(identity, f"beta={beta} {params}", lhs, rhs, reducer)
        for identity, params, lhs, rhs in _shift_identities(nu, grid, ambient_pairs(nu)):
            tally.check(identity, f"beta={beta} {params}", lhs, rhs, reducer)
        _normal_form_contract(tally, reducer, grid, rng)
    return list(tally.results.values())


def diagram_suite(grid: Grid) -> list[IdentityResult]:
    """Diagram pipelines on random diagrams and on embedded basis words."""
    tally = _Tally("diagram")
    rng = np.random.default_rng(grid.seed)
    spaces: list[ReductionConfig] = [Annulus(c) for c in grid.c_values]
    spaces += [FiberedTorus(beta) for beta in grid.beta_values]
    reducers = {space: Reducer(space, grid.fuel) for space in spaces}

    def value(d: SliceDiagram, space: ReductionConfig) -> ModuleElement:
        return evaluate(d, space, grid.fuel, grid.crossing_cap, reducer=reducers[space])

    for case in range(grid.diagrams if spaces else 0):
        d = random_diagram(rng)
        space = spaces[case % len(spaces)]
        kind = "annulus" if isinstance(space, Annulus) else "torus"
        try:
            ok = resolve_states(d, grid.crossing_cap) == resolve_skein(d, grid.crossing_cap)
        except DiagramError:
            ok = False
        tally["state sum equals recursive skein"].record(ok, lambda: str(d))

        crossings = d.crossings()
        if crossings:
            index = crossings[int(rng.integers(len(crossings)))]
            try:
                plus, d0, dinf = skein_triple(d, index)
                ok = value(plus, space) == value(d0, space) * A_pow(1) + value(dinf, space) * A_pow(-1)
            except (DiagramError, ReductionError):
                ok = False
            tally[f"skein triple linearity ({kind})"].record(ok, lambda: f"{space} crossing {index}: {d}")

        circled = SliceDiagram(d.base_strands, (cap(1), cup(1)) + d.events)
        try:
            ok = value(circled, space) == value(d, space) * (A_pow(2, -1) + A_pow(-2, -1))
        except (DiagramError, ReductionError):
            ok = False
        tally["trivial circle factor"].record(ok, lambda: f"{space}: {d}")

        picked = random_move(rng, d)
        if picked is not None:
            move, site = picked
            try:
                ok = value(apply_move(d, move, site), space) == value(d, space)
            except (DiagramError, ReductionError):
                ok = False
            tally[f"invariance under {move.value}"].record(ok, lambda: f"{space} {site}: {d}")

    for c in grid.c_values:
        for w in sigma_c_words(c):
            d, unit = embed_word(w)
            tally["embedding round trip (annulus)"].record(
                value(d, Annulus(c)) * unit == ModuleElement.from_word(w), lambda: f"c={c}: {w}"
            )
    for beta in grid.beta_values:
        for w in sigma_prime_words(beta // 2):
            d, unit = embed_word(w)
            tally["embedding round trip (torus)"].record(
                value(d, FiberedTorus(beta)) * unit == ModuleElement.from_word(w), lambda: f"beta={beta}: {w}"
            )
    return list(tally.results.values())


SUITES: dict[str, Callable[[Grid], list[IdentityResult]]] = {
    "polys": polys_suite,
    "annulus": annulus_suite,
    "torus": torus_suite,
    "diagram": diagram_suite,
}


def run_suites(suite: str, grid: Optional[Grid] = None) -> pd.DataFrame:
    """Run one suite, or all of them for ``"all"``.

    Returns
    -------
    pd.DataFrame
        One row per identity with columns ``suite, identity, instances,
        failures, passed``.
    """
    grid = grid or Grid()
    names = list(SUITES) if suite == "all" else [suite]
    rows = []
    for name in names:
        for result in SUITES[name](grid):
            rows.append((result.suite, result.identity, result.instances, result.failures, result.passed))
        log.debug(f"[verify {name}] -- done")
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)
