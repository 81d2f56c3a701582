"""Normal-form engines for the annulus basis Sigma_c and the fibered-torus
basis Sigma'_nu.

Words are matched at their outer end: the maximal trailing run of ``x_c``
generators (each followed by an empty lambda-run) is set aside and the rule is
chosen from the generator just inside that run. Rule labels follow the case
list of the construction: ``b`` marks a basis word, ``c``-``i`` the annulus
rewrites, ``j``/``k`` the two extra torus rewrites.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .exceptions import CycleDetected, FuelExhausted
from .laurent import ONE, A_pow, LaurentPoly
from .polyfam import LAMBDA, ppoly_k
from .words import (
    Annulus,
    FiberedTorus,
    GammaWord,
    ModuleElement,
    ReductionConfig,
    in_sigma_c,
    splice,
    word_concat,
)

log = logging.getLogger(__name__)

DEFAULT_FUEL = 1_000_000

RULE_LABELS = frozenset("bcdefghijk")


class Strategy(str, Enum):
    RIGHT_ANCHORED = "right"
    LEFTMOST_INNERMOST = "leftmost"


@dataclass(frozen=True)
class TraceStep:
    rule: str
    word: GammaWord
    result: ModuleElement

    def __post_init__(self) -> None:
        if self.rule not in RULE_LABELS:
            raise ValueError(f"Unknown rule label: {self.rule!r}. Expected one of {sorted(RULE_LABELS)}")

    def __str__(self) -> str:
        return f"rule={self.rule} in={self.word} out={self.result}"


@dataclass
class ReductionTrace:
    """Audit log of every rule application made by a :class:`Reducer`."""

    steps: list[TraceStep] = field(default_factory=list)
    fuel_used: int = 0

    def lines(self) -> list[str]:
        return [str(step) for step in self.steps]

    def replay(self, e: ModuleElement) -> ModuleElement:
        """Rewrite ``e`` with the recorded steps until none applies."""
        table = {step.word: step.result for step in self.steps}
        current = e
        while any(w in table for w in current.words()):
            nxt = ModuleElement()
            for w, c in current.items():
                nxt = nxt + (table[w] if w in table else ModuleElement.from_word(w)) * c
            current = nxt
        return current


class Reducer:
    """Memoized rewriting of Gamma words onto a basis.

    The memo table lives on the instance, so one Reducer may be reused across
    calls for the same space.

    Parameters
    ----------
    space : ReductionConfig
        ``Annulus(c)`` or ``FiberedTorus(beta)``.
    fuel : int, optional
        Rule applications allowed per input term. Defaults to 1000000.
    strategy : Strategy, optional
        Evaluation order. Defaults to right-anchored.
    trace : Optional[ReductionTrace], optional
        When given, every rule application is appended to it.

    Raises
    ------
    ValueError
        If fuel is not positive.
    """

    def __init__(
        self,
        space: ReductionConfig,
        fuel: int = DEFAULT_FUEL,
        strategy: Strategy = Strategy.RIGHT_ANCHORED,
        trace: Optional[ReductionTrace] = None,
    ) -> None:
        if fuel <= 0:
            raise ValueError(f"fuel must be a positive integer, got {fuel}")
        self.space = space
        self.fuel = fuel
        self.strategy = Strategy(strategy)
        self.trace = trace
        self._torus = isinstance(space, FiberedTorus)
        self._memo: dict[GammaWord, ModuleElement] = {}
        self._rules: dict[GammaWord, Optional[ModuleElement]] = {}
        self._alt_memo: dict[GammaWord, ModuleElement] = {}
        self._fuel_left = fuel

    def reduce(self, e: Union[ModuleElement, GammaWord]) -> ModuleElement:
        """Linear extension of the normal form to ``e``."""
        e = ModuleElement.coerce(e)
        acc: dict[GammaWord, LaurentPoly] = {}
        for w, c in e.items():
            self._fuel_left = self.fuel
            nf = self.normal_form(w)
            if self.trace is not None:
                self.trace.fuel_used += self.fuel - self._fuel_left
            for u, d in nf.items():
                prev = acc.get(u)
                acc[u] = c * d if prev is None else prev + c * d
        result = ModuleElement._wrap(acc)
        log.debug(f"[reduce {self.space}] -- {len(e)} terms -> {len(result)} terms")
        return result

    def normal_form(self, w: GammaWord) -> ModuleElement:
        if self.strategy is Strategy.LEFTMOST_INNERMOST:
            return self._normal_form_leftmost(w)
        return self._normal_form(w)

    def rewrite(self, w: GammaWord) -> Optional[tuple[str, ModuleElement]]:
        """Apply one rule to ``w``.

        Returns
        -------
        Optional[tuple[str, ModuleElement]]
            The rule label and the rewritten element, or None when ``w`` is
            already a basis word.
        """
        c = self.space.anchor
        lam, xs = w.lambda_exps, w.x_indices
        k = len(xs)
        if k == 0:
            return None
        run = 0
        while run < k and xs[k - 1 - run] == c and lam[k - run] == 0:
            run += 1
        if run == k:
            run = k - 1
        i = k - run
        m = xs[i - 1]
        n = lam[i]

        if i == 1:
            if lam[0] >= 1:
                return "g", self._rule_g(lam, xs, m)
            if m == c or m == c + 1:
                if not self._torus:
                    return None
                if m == c + 1:
                    return "j", ModuleElement.from_word(GammaWord(lam, (c,) + xs[1:]), A_pow(3, -1))
                if run == 0:
                    return None
                return "k", self._rule_k(run, n)
            if m > c + 1:
                return "h", self._pair(
                    GammaWord((0, n + 1) + lam[2:], (m - 1,) + xs[1:]), A_pow(1),
                    GammaWord(lam, (m - 2,) + xs[1:]), A_pow(2, -1),
                )
            return "i", self._pair(
                GammaWord((0, n + 1) + lam[2:], (m + 1,) + xs[1:]), A_pow(-1),
                GammaWord(lam, (m + 2,) + xs[1:]), A_pow(-2, -1),
            )

        head, tail = xs[: i - 1], xs[i:]
        if n >= 1:
            lam2 = lam[:i] + (n - 1,) + lam[i + 1:]
            return "c", self._pair(
                GammaWord(lam2, head + (m - 1,) + tail), A_pow(1),
                GammaWord(lam2, head + (m + 1,) + tail), A_pow(-1),
            )
        bumped = lam[: i - 1] + (lam[i - 1] + 1,) + lam[i:]
        if m > c + 1:
            return "d", self._pair(
                GammaWord(bumped, head + (m - 1,) + tail), A_pow(-1),
                GammaWord(lam, head + (m - 2,) + tail), A_pow(-2, -1),
            )
        if m < c:
            return "e", self._pair(
                GammaWord(bumped, head + (m + 1,) + tail), A_pow(1),
                GammaWord(lam, head + (m + 2,) + tail), A_pow(2, -1),
            )
        return "f", self._rule_f(lam, xs, i, run)

    @staticmethod
    def _pair(w1: GammaWord, c1: LaurentPoly, w2: GammaWord, c2: LaurentPoly) -> ModuleElement:
        return ModuleElement({w1: c1}) + ModuleElement({w2: c2})

    def _rule_g(self, lam: tuple[int, ...], xs: tuple[int, ...], m: int) -> ModuleElement:
        lam2 = (lam[0] - 1,) + lam[1:]
        return self._pair(
            GammaWord(lam2, (m + 1,) + xs[1:]), A_pow(1),
            GammaWord(lam2, (m - 1,) + xs[1:]), A_pow(-1),
        )

    def _rule_f(self, lam: tuple[int, ...], xs: tuple[int, ...], i: int, run: int) -> ModuleElement:
        # w' x_m lambda^n x_{c+1} (x_c)^run, with x_m the generator at index i - 1
        c = self.space.anchor
        j = i - 1
        m = xs[j - 1]
        n = lam[j]
        base = GammaWord(lam[:j] + (0,) * run, xs[: j - 1] + (c,) * run)
        poly = LAMBDA * ppoly_k(c - m, n) * A_pow(-1, -1) + ppoly_k(c - 1 - m, n) * 2
        shifted = GammaWord(
            lam[:j] + (n,) + (0,) * (run + 1),
            xs[: j - 1] + (m + 1,) + (c,) * (run + 1),
        )
        return splice(base, j - 1, poly) + ModuleElement({shifted: A_pow(-2)})

    def _rule_k(self, run: int, n: int) -> ModuleElement:
        nu = self.space.anchor
        base = GammaWord((0,) * run, (nu,) * (run - 1))
        poly = ppoly_k(-1, n) * A_pow(-1) - ppoly_k(0, n) * A_pow(-2)
        return splice(base, 0, poly)

    def _spend(self, root: GammaWord) -> None:
        self._fuel_left -= 1
        if self._fuel_left < 0:
            raise FuelExhausted(self.fuel, str(root))

    def _expansion(self, w: GammaWord, root: GammaWord) -> Optional[ModuleElement]:
        if w in self._rules:
            return self._rules[w]
        step = self.rewrite(w)
        if step is None:
            self._rules[w] = None
            return None
        self._spend(root)
        rule, expansion = step
        if self.trace is not None:
            self.trace.steps.append(TraceStep(rule, w, expansion))
        self._rules[w] = expansion
        return expansion

    def _children(self, w: GammaWord, root: GammaWord) -> list[GammaWord]:
        if w is not root and w in self._memo:
            return []
        expansion = self._expansion(w, root)
        return [] if expansion is None else expansion.words()

    def _normal_form(self, root: GammaWord) -> ModuleElement:
        """Right-anchored normal form of ``root``.

        The rewrite graph below ``root`` is walked once depth-first, then the
        coefficients are pushed from ``root`` towards the basis words in
        topological order. Only roots are memoized; every rewrite is kept.
        """
        memo = self._memo
        if root in memo:
            return memo[root]
        postorder: list[GammaWord] = []
        seen = {root}
        path = {root}
        stack = [(root, iter(self._children(root, root)))]
        while stack:
            w, children = stack[-1]
            for u in children:
                if u in path:
                    raise CycleDetected(str(u))
                if u in seen:
                    continue
                seen.add(u)
                path.add(u)
                stack.append((u, iter(self._children(u, root))))
                break
            else:
                stack.pop()
                path.discard(w)
                postorder.append(w)

        coeffs: dict[GammaWord, LaurentPoly] = {root: ONE}
        acc: dict[GammaWord, LaurentPoly] = {}
        for w in reversed(postorder):
            c = coeffs.pop(w, None)
            if not c:
                continue
            if w is not root and w in memo:
                targets, into = memo[w].items(), acc
            elif self._rules[w] is None:
                targets, into = ((w, ONE),), acc
            else:
                targets, into = self._rules[w].items(), coeffs
            for u, d in targets:
                prev = into.get(u)
                into[u] = c * d if prev is None else prev + c * d
        result = ModuleElement._wrap(acc)
        memo[root] = result
        return result

    def _normal_form_leftmost(self, w: GammaWord) -> ModuleElement:
        """Normalize the inner prefix first, then re-attach the outermost generator.

        For ``w = u v`` with ``v`` the outermost ``x_m lambda^n``, the normal
        form is ``sum r * NF(u' v)`` over the terms ``r u'`` of ``NF(u)``.
        """
        if w.k <= 1:
            return self._normal_form(w)
        cached = self._alt_memo.get(w)
        if cached is not None:
            return cached
        u = GammaWord(w.lambda_exps[: w.k], w.x_indices[: w.k - 1])
        v = GammaWord((0, w.lambda_exps[-1]), (w.x_indices[-1],))
        acc: dict[GammaWord, LaurentPoly] = {}
        for u2, r in self._normal_form_leftmost(u).items():
            for t, d in self._normal_form(word_concat(u2, v)).items():
                prev = acc.get(t)
                acc[t] = r * d if prev is None else prev + r * d
        result = ModuleElement._wrap(acc)
        self._alt_memo[w] = result
        return result


def reduce_c(
    e: Union[ModuleElement, GammaWord],
    c: int,
    fuel: int = DEFAULT_FUEL,
    strategy: Strategy = Strategy.RIGHT_ANCHORED,
    trace: Optional[ReductionTrace] = None,
) -> ModuleElement:
    """Reduce ``e`` onto the annulus basis Sigma_c.

    Parameters
    ----------
    e : Union[ModuleElement, GammaWord]
        Element to reduce.
    c : int
        Basis index.
    fuel : int, optional
        Rule applications allowed per input term. Defaults to 1000000.
    strategy : Strategy, optional
        Evaluation order. Defaults to right-anchored.
    trace : Optional[ReductionTrace], optional
        Collects the rule applications when given.

    Returns
    -------
    ModuleElement
        Combination of Sigma_c words.

    Raises
    ------
    FuelExhausted
        If a term needs more than ``fuel`` rule applications.
    CycleDetected
        If a word's reduction requires itself.
    """
    return Reducer(Annulus(c), fuel, strategy, trace).reduce(e)


def reduce_nu(
    e: Union[ModuleElement, GammaWord],
    beta: int,
    fuel: int = DEFAULT_FUEL,
    strategy: Strategy = Strategy.RIGHT_ANCHORED,
    trace: Optional[ReductionTrace] = None,
) -> ModuleElement:
    """Reduce ``e`` onto the fibered-torus basis Sigma'_nu, nu = floor(beta / 2).

    Same parameters and errors as :func:`reduce_c`, with ``beta`` in place of ``c``.
    """
    return Reducer(FiberedTorus(beta), fuel, strategy, trace).reduce(e)


@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of comparing two elements through one engine."""

    passed: bool
    lhs: ModuleElement
    rhs: ModuleElement
    difference: ModuleElement

    def __bool__(self) -> bool:
        return self.passed

    def report(self) -> str:
        if self.passed:
            return f"ok: {self.lhs}"
        return f"mismatch: lhs={self.lhs} rhs={self.rhs} diff={self.difference}"


def check_identity(
    lhs: Union[ModuleElement, GammaWord],
    rhs: Union[ModuleElement, GammaWord],
    cfg: ReductionConfig,
    reducer: Optional[Reducer] = None,
) -> IdentityCheck:
    """Decide ``lhs == rhs`` in the skein module by comparing normal forms.

    Parameters
    ----------
    lhs, rhs : Union[ModuleElement, GammaWord]
        The two sides.
    cfg : ReductionConfig
        Engine to use.
    reducer : Optional[Reducer], optional
        A reducer for ``cfg`` whose memo table may be shared across checks.

    Returns
    -------
    IdentityCheck
        Truthy iff the normal forms agree.
    """
    if reducer is None:
        reducer = Reducer(cfg)
    elif reducer.space != cfg:
        raise ValueError(f"Reducer for {reducer.space} cannot check identities in {cfg}")
    left = reducer.reduce(lhs)
    right = reducer.reduce(rhs)
    diff = left - right
    return IdentityCheck(not diff, left, right, diff)


def rebase(
    e: ModuleElement,
    c_from: int,
    c_to: int,
    fuel: int = DEFAULT_FUEL,
    reducer: Optional[Reducer] = None,
) -> ModuleElement:
    """Rewrite an element of R Sigma_{c_from} in the basis Sigma_{c_to}.

    ``reducer``, when given, must target ``Annulus(c_to)``.

    Raises
    ------
    ValueError
        If ``e`` has a word outside Sigma_{c_from}, or the reducer targets
        another space.
    """
    if not e.supported_on(lambda w: in_sigma_c(w, c_from)):
        raise ValueError(f"Element {e} is not supported on Sigma_{c_from}")
    if reducer is None:
        return reduce_c(e, c_to, fuel)
    if reducer.space != Annulus(c_to):
        raise ValueError(f"Reducer for {reducer.space} cannot rebase onto Sigma_{c_to}")
    return reducer.reduce(e)
