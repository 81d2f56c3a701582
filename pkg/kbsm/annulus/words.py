"""Crossingless annular words, formal R-linear combinations of them, and the
expression language used to write such combinations as text.

A word ``lambda^{n0} x_{m1} lambda^{n1} ... x_{mk} lambda^{nk}`` is read from
the inner boundary of the annulus to the outer one: ``x_m`` is an essential
curve carrying m arrows and each lambda-run sits in the region between two
consecutive essential curves.
"""

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from .exceptions import ParseError
from .laurent import ONE, LaurentPoly, lp_parse, lp_print
from .polyfam import LambdaPoly, ppoly, ppoly_k, qpoly


@dataclass(frozen=True, slots=True)
class GammaWord:
    """A word of the generator set Gamma.

    Parameters
    ----------
    lambda_exps : tuple[int, ...]
        Lambda-runs n0..nk, one per gap; all non-negative.
    x_indices : tuple[int, ...]
        Arrow counts m1..mk of the essential curves, inner to outer.

    Raises
    ------
    ValueError
        If the run count is not one more than the curve count, or a run is
        negative.
    """

    lambda_exps: tuple[int, ...] = (0,)
    x_indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.lambda_exps) != len(self.x_indices) + 1:
            raise ValueError(
                f"A word with {len(self.x_indices)} x-generators needs "
                f"{len(self.x_indices) + 1} lambda-runs, got {len(self.lambda_exps)}"
            )
        if any(n < 0 for n in self.lambda_exps):
            raise ValueError(f"lambda-runs must be non-negative, got {self.lambda_exps}")

    @classmethod
    def lam(cls, n: int = 1) -> "GammaWord":
        return cls((n,), ())

    @classmethod
    def x(cls, m: int) -> "GammaWord":
        return cls((0, 0), (m,))

    @classmethod
    def of(cls, *factors: Union[int, str]) -> "GammaWord":
        """Build a word from factors: an int m is ``x_m``, ``"l"`` is one lambda."""
        word = EMPTY_WORD
        for f in factors:
            word = word_concat(word, GammaWord.lam() if f == "l" else GammaWord.x(int(f)))
        return word

    @property
    def k(self) -> int:
        return len(self.x_indices)

    def with_lambda(self, gap: int, delta: int) -> "GammaWord":
        """Return this word with the lambda-run at ``gap`` changed by ``delta``."""
        exps = list(self.lambda_exps)
        exps[gap] += delta
        return GammaWord(tuple(exps), self.x_indices)

    def sort_key(self) -> tuple:
        return (self.k, self.x_indices, self.lambda_exps)

    def __str__(self) -> str:
        parts: list[str] = []

        def run(n: int) -> None:
            if n == 1:
                parts.append("l")
            elif n > 1:
                parts.append(f"l^{n}")

        run(self.lambda_exps[0])
        for m, n in zip(self.x_indices, self.lambda_exps[1:]):
            parts.append(f"x({m})")
            run(n)
        return " ".join(parts) if parts else "1"


EMPTY_WORD = GammaWord()


def word_concat(a: GammaWord, b: GammaWord) -> GammaWord:
    """Juxtapose ``a`` (inner) and ``b`` (outer), merging the seam lambda-runs."""
    if not b.x_indices:
        if not b.lambda_exps[0]:
            return a
        return a.with_lambda(a.k, b.lambda_exps[0])
    seam = a.lambda_exps[-1] + b.lambda_exps[0]
    return GammaWord(
        a.lambda_exps[:-1] + (seam,) + b.lambda_exps[1:],
        a.x_indices + b.x_indices,
    )


class ModuleElement:
    """A finite R-linear combination of Gamma words.

    Parameters
    ----------
    terms : Optional[Mapping[GammaWord, Union[LaurentPoly, int]]], optional
        Map from word to coefficient; zero coefficients are dropped.
        Defaults to the zero element.

    Notes
    -----
    ``element * scalar`` scales, ``element * other`` (another element, a word
    or a LambdaPoly) is juxtaposition with ``other`` placed outside.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[GammaWord, Union[LaurentPoly, int]]] = None) -> None:
        clean: dict[GammaWord, LaurentPoly] = {}
        for w, c in (terms or {}).items():
            c = LaurentPoly.coerce(c)
            if c:
                clean[w] = c
        self._terms = clean
        self._hash: Optional[int] = None

    @classmethod
    def _wrap(cls, acc: dict[GammaWord, LaurentPoly]) -> "ModuleElement":
        obj = cls.__new__(cls)
        obj._terms = {w: c for w, c in acc.items() if c}
        obj._hash = None
        return obj

    @classmethod
    def from_word(cls, w: GammaWord, coeff: Union[LaurentPoly, int] = 1) -> "ModuleElement":
        return cls({w: coeff})

    @classmethod
    def from_lambda(cls, p: LambdaPoly) -> "ModuleElement":
        """Read ``sum c_j lambda^j`` as a combination of the words ``lambda^j``."""
        return cls._wrap({GammaWord.lam(j): c for j, c in p.items()})

    @classmethod
    def coerce(cls, value: Union["ModuleElement", GammaWord, LambdaPoly]) -> "ModuleElement":
        if isinstance(value, ModuleElement):
            return value
        if isinstance(value, GammaWord):
            return cls.from_word(value)
        if isinstance(value, LambdaPoly):
            return cls.from_lambda(value)
        raise TypeError(f"Cannot use {type(value).__name__} as a module element")

    def items(self) -> Iterator[tuple[GammaWord, LaurentPoly]]:
        return iter(self._terms.items())

    def words(self) -> list[GammaWord]:
        return list(self._terms)

    def coefficient(self, w: GammaWord) -> LaurentPoly:
        return self._terms.get(w, LaurentPoly())

    def sorted_items(self) -> list[tuple[GammaWord, LaurentPoly]]:
        """Terms in print order: descending (k, x_indices, lambda_exps)."""
        return sorted(self._terms.items(), key=lambda t: t[0].sort_key(), reverse=True)

    def supported_on(self, predicate: Callable[[GammaWord], bool]) -> bool:
        return all(predicate(w) for w in self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __neg__(self) -> "ModuleElement":
        return ModuleElement._wrap({w: -c for w, c in self._terms.items()})

    def __add__(self, other: "ModuleElement") -> "ModuleElement":
        if not isinstance(other, ModuleElement):
            return NotImplemented
        acc = dict(self._terms)
        for w, c in other._terms.items():
            prev = acc.get(w)
            acc[w] = c if prev is None else prev + c
        return ModuleElement._wrap(acc)

    def __sub__(self, other: "ModuleElement") -> "ModuleElement":
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (LaurentPoly, int)):
            r = LaurentPoly.coerce(other)
            if not r:
                return ModuleElement()
            return ModuleElement._wrap({w: c * r for w, c in self._terms.items()})
        if isinstance(other, (ModuleElement, GammaWord, LambdaPoly)):
            other = ModuleElement.coerce(other)
            acc: dict[GammaWord, LaurentPoly] = {}
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    w = word_concat(w1, w2)
                    prev = acc.get(w)
                    acc[w] = c1 * c2 if prev is None else prev + c1 * c2
            return ModuleElement._wrap(acc)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (LaurentPoly, int)):
            return self * other
        if isinstance(other, (GammaWord, LambdaPoly)):
            return ModuleElement.coerce(other) * self
        return NotImplemented

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"{{{lp_print(c)}}}*{w}" for w, c in self.sorted_items())

    def __repr__(self) -> str:
        return f"ModuleElement('{self}')"

    def to_records(self) -> list[dict[str, str]]:
        """JSON-ready list of ``{"coeff": ..., "word": ...}`` in print order."""
        return [{"coeff": lp_print(c), "word": str(w)} for w, c in self.sorted_items()]

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, str]]) -> "ModuleElement":
        total = cls()
        for rec in records:
            total = total + parse_expression(str(rec["word"])) * lp_parse(str(rec["coeff"]))
        return total


def splice(w: GammaWord, pos: int, p: LambdaPoly) -> ModuleElement:
    """Insert the R[lambda] value ``p`` into gap ``pos`` of ``w``.

    Parameters
    ----------
    w : GammaWord
        Host word.
    pos : int
        Gap index, 0 (innermost) to ``w.k`` (outermost).
    p : LambdaPoly
        ``sum c_j lambda^j``.

    Returns
    -------
    ModuleElement
        ``sum c_j * (w with lambda-run at pos raised by j)``.

    Raises
    ------
    ValueError
        If ``pos`` is not a gap of ``w``.
    """
    if not 0 <= pos <= w.k:
        raise ValueError(f"Gap {pos} is outside 0..{w.k} for word {w}")
    return ModuleElement._wrap({w.with_lambda(pos, j): c for j, c in p.items()})


def in_sigma_c(w: GammaWord, c: int) -> bool:
    """Is ``w`` one of lambda^n, x_c lambda^n (x_c)^k, x_{c+1} lambda^n (x_c)^k?"""
    if not w.x_indices:
        return True
    if w.lambda_exps[0] != 0 or w.x_indices[0] not in (c, c + 1):
        return False
    return all(m == c for m in w.x_indices[1:]) and not any(w.lambda_exps[2:])


def in_sigma_prime(w: GammaWord, nu: int) -> bool:
    """Is ``w`` one of lambda^n, x_nu lambda^n?"""
    if not w.x_indices:
        return True
    return w.k == 1 and w.x_indices[0] == nu and w.lambda_exps[0] == 0


@dataclass(frozen=True)
class Annulus:
    """Target basis Sigma_c of the skein module of the annulus times S^1."""

    c: int = 0

    @property
    def anchor(self) -> int:
        return self.c

    def in_basis(self, w: GammaWord) -> bool:
        return in_sigma_c(w, self.c)

    def __str__(self) -> str:
        return f"annulus c={self.c}"


@dataclass(frozen=True)
class FiberedTorus:
    """Target basis Sigma'_nu of the (beta, 2)-fibered torus, nu = floor(beta / 2)."""

    beta: int

    @property
    def nu(self) -> int:
        return self.beta // 2

    @property
    def anchor(self) -> int:
        return self.nu

    def in_basis(self, w: GammaWord) -> bool:
        return in_sigma_prime(w, self.nu)

    def __str__(self) -> str:
        return f"fibered beta={self.beta}"


ReductionConfig = Union[Annulus, FiberedTorus]


class _ExprParser:
    """Parser for the expression language, e.g. ``{-A^3}*l x(5) + x(2) l^2 x(2)``."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def _error(self, message: str) -> None:
        raise ParseError(message, self.pos)

    def _peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str) -> None:
        if self._peek() != ch:
            self._error(f"Expected {ch!r}")
        self.pos += 1

    def _int(self, signed: bool = True) -> int:
        sign = 1
        if signed and self._peek() in ("-", "+"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        self._peek()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self._error("Expected an integer")
        return sign * int(self.text[start:self.pos])

    def parse(self) -> ModuleElement:
        if self.text.strip() == "0":
            return ModuleElement()
        total = ModuleElement()
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        while True:
            term = self._term()
            total = total + (-term if sign < 0 else term)
            ch = self._peek()
            if not ch:
                return total
            if ch not in ("+", "-"):
                self._error(f"Unexpected character {ch!r}")
            sign = -1 if ch == "-" else 1
            self.pos += 1

    def _term(self) -> ModuleElement:
        coeff = ONE
        has_coeff = False
        if self._peek() == "{":
            start = self.pos + 1
            end = self.text.find("}", start)
            if end < 0:
                self._error("Unclosed '{'")
            coeff = lp_parse(self.text[start:end], offset=start)
            self.pos = end + 1
            has_coeff = True
            if self._peek() != "*":
                return ModuleElement.from_word(EMPTY_WORD, coeff)
            self.pos += 1
        element = ModuleElement.from_word(EMPTY_WORD, coeff)
        factors = 0
        while self._peek() and self._peek() not in ("+", "-"):
            element = element * self._factor()
            factors += 1
        if not factors:
            self._error("Expected a factor after '*'" if has_coeff else "Expected a term")
        return element

    def _factor(self) -> ModuleElement:
        ch = self._peek()
        if ch == "l":
            self.pos += 1
            n = 1
            if self._peek() == "^":
                self.pos += 1
                n = self._int(signed=False)
            return ModuleElement.from_word(GammaWord.lam(n))
        if ch == "1":
            self.pos += 1
            return ModuleElement.from_word(EMPTY_WORD)
        if ch in ("x", "t", "P", "Q"):
            self.pos += 1
            self._expect("(")
            n = self._int()
            k = None
            if ch in ("t", "P") and self._peek() == ",":
                self.pos += 1
                k = self._int(signed=False)
            self._expect(")")
            if ch == "x":
                return ModuleElement.from_word(GammaWord.x(n))
            if ch == "Q":
                return ModuleElement.from_lambda(qpoly(n))
            return ModuleElement.from_lambda(ppoly(n) if k is None else ppoly_k(n, k))
        self._error(f"Unexpected character {ch!r}" if ch else "Unexpected end of input")


def parse_expression(text: str) -> ModuleElement:
    """Parse an expression into a ModuleElement.

    Factors are ``l``, ``l^n``, ``x(m)``, ``1`` and the macros ``t(n)``,
    ``t(n,k)``, ``P(n)``, ``P(n,k)``, ``Q(n)``, which expand to polynomials in
    lambda at their position. Juxtaposition runs inner to outer; terms take an
    optional ``{poly}*`` coefficient.

    Parameters
    ----------
    text : str
        Expression text.

    Returns
    -------
    ModuleElement
        The parsed combination.

    Raises
    ------
    ParseError
        On malformed input, with the character position.
    """
    return _ExprParser(text).parse()
