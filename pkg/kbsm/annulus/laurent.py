"""Exact arithmetic in the coefficient ring Z[A, A^-1]."""

from typing import Iterator, Mapping, Optional, Union

from .exceptions import ParseError

Scalar = Union["LaurentPoly", int]


class LaurentPoly:
    """A Laurent polynomial in A with integer coefficients.

    Values are immutable and kept in canonical form: a tuple of
    ``(exponent, coefficient)`` pairs sorted by exponent with no zero
    coefficient, so equality and hashing are structural.

    Parameters
    ----------
    terms : Optional[Mapping[int, int]], optional
        Map from exponent of A to integer coefficient. Zero coefficients are
        dropped. Defaults to the zero polynomial.

    Examples
    --------
    >>> LaurentPoly({2: -1, -2: -1})
    LaurentPoly('-A^-2-A^2')
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[int, int]] = None) -> None:
        items = () if not terms else tuple(sorted((e, c) for e, c in terms.items() if c != 0))
        self._terms: tuple[tuple[int, int], ...] = items
        self._hash: Optional[int] = None

    @classmethod
    def _from_sorted(cls, items: tuple[tuple[int, int], ...]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._terms = items
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, value: Scalar) -> "LaurentPoly":
        """Return ``value`` as a LaurentPoly, lifting integers to constants."""
        if isinstance(value, LaurentPoly):
            return value
        if isinstance(value, int):
            return lp_monomial(value, 0)
        raise TypeError(f"Cannot use {type(value).__name__} as a Laurent polynomial")

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[int, int]]:
        return iter(self._terms)

    def coefficient(self, exp: int) -> int:
        for e, c in self._terms:
            if e == exp:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self._terms

    def is_unit(self) -> bool:
        """True for the monomials +-A^k, the units of the ring."""
        return len(self._terms) == 1 and self._terms[0][1] in (1, -1)

    def valuation(self) -> int:
        if not self._terms:
            raise ValueError("The zero polynomial has no valuation")
        return self._terms[0][0]

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("The zero polynomial has no degree")
        return self._terms[-1][0]

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by A^k."""
        if k == 0:
            return self
        return LaurentPoly._from_sorted(tuple((e + k, c) for e, c in self._terms))

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.coerce(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._from_sorted(tuple((e, -c) for e, c in self._terms))

    def __add__(self, other: Scalar) -> "LaurentPoly":
        return lp_add(self, LaurentPoly.coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> "LaurentPoly":
        return lp_add(self, -LaurentPoly.coerce(other))

    def __rsub__(self, other: Scalar) -> "LaurentPoly":
        return lp_add(LaurentPoly.coerce(other), -self)

    def __mul__(self, other: Scalar) -> "LaurentPoly":
        if isinstance(other, (LaurentPoly, int)):
            return lp_mul(self, LaurentPoly.coerce(other))
        return NotImplemented

    def __rmul__(self, other: Scalar) -> "LaurentPoly":
        if isinstance(other, int):
            return lp_mul(LaurentPoly.coerce(other), self)
        return NotImplemented

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_unit():
                raise ValueError(f"Only units have negative powers, got {self}")
            (e, c), = self._terms
            return lp_monomial(c ** (-n), e * n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __str__(self) -> str:
        return lp_print(self)

    def __repr__(self) -> str:
        return f"LaurentPoly('{lp_print(self)}')"


def lp_monomial(coeff: int, exp: int) -> LaurentPoly:
    """Single-term polynomial ``coeff * A^exp``; a zero coefficient gives 0."""
    if coeff == 0:
        return LaurentPoly._from_sorted(())
    return LaurentPoly._from_sorted(((exp, coeff),))


def lp_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if not a._terms:
        return b
    if not b._terms:
        return a
    acc = dict(a._terms)
    for e, c in b._terms:
        acc[e] = acc.get(e, 0) + c
    return LaurentPoly(acc)


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    if not a._terms or not b._terms:
        return ZERO
    if len(a._terms) == 1:
        (e0, c0), = a._terms
        return LaurentPoly._from_sorted(tuple((e0 + e, c0 * c) for e, c in b._terms))
    if len(b._terms) == 1:
        (e0, c0), = b._terms
        return LaurentPoly._from_sorted(tuple((e0 + e, c0 * c) for e, c in a._terms))
    acc: dict[int, int] = {}
    for e1, c1 in a._terms:
        for e2, c2 in b._terms:
            acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
    return LaurentPoly(acc)


def lp_print(a: LaurentPoly) -> str:
    """Canonical text of ``a``: ascending exponents, no whitespace.

    Parameters
    ----------
    a : LaurentPoly
        Value to print.

    Returns
    -------
    str
        E.g. ``"-A^-2-A^2"`` or ``"3A^-4+1"``; ``"0"`` for zero.
    """
    if not a._terms:
        return "0"
    parts: list[str] = []
    for e, c in a._terms:
        if parts:
            sign = "+" if c > 0 else "-"
        else:
            sign = "" if c > 0 else "-"
        if e == 0:
            body = str(abs(c))
        else:
            mult = "" if abs(c) == 1 else str(abs(c))
            body = f"{mult}A" if e == 1 else f"{mult}A^{e}"
        parts.append(sign + body)
    return "".join(parts)


class _PolyParser:
    """Recursive-descent parser for ``poly := term (('+'|'-') term)*``."""

    def __init__(self, text: str, offset: int = 0) -> None:
        self.text = text
        self.pos = 0
        self.offset = offset

    def _error(self, message: str) -> None:
        raise ParseError(message, self.offset + self.pos)

    def _peek(self) -> str:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _digits(self) -> Optional[int]:
        self._peek()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start:self.pos]) if self.pos > start else None

    def parse(self) -> LaurentPoly:
        acc: dict[int, int] = {}
        sign = 1
        ch = self._peek()
        if ch and ch in "+-":
            sign = -1 if ch == "-" else 1
            self.pos += 1
        self._term(sign, acc)
        while True:
            ch = self._peek()
            if not ch:
                break
            if ch not in "+-":
                self._error(f"Unexpected character {ch!r}")
            self.pos += 1
            self._term(-1 if ch == "-" else 1, acc)
        return LaurentPoly(acc)

    def _term(self, sign: int, acc: dict[int, int]) -> None:
        coeff = self._digits()
        exp = 0
        has_a = False
        if self._peek() == "A":
            has_a = True
            self.pos += 1
            exp = 1
            if self._peek() == "^":
                self.pos += 1
                exp_sign = 1
                ch = self._peek()
                if ch and ch in "+-":
                    exp_sign = -1 if ch == "-" else 1
                    self.pos += 1
                digits = self._digits()
                if digits is None:
                    self._error("Expected an integer exponent")
                exp = exp_sign * digits
        if coeff is None and not has_a:
            self._error("Expected a term")
        if coeff is None:
            coeff = 1
        acc[exp] = acc.get(exp, 0) + sign * coeff


def lp_parse(text: str, offset: int = 0) -> LaurentPoly:
    """Parse the polynomial text grammar.

    Parameters
    ----------
    text : str
        Text such as ``"-A^2-A^-2"``; whitespace is ignored.
    offset : int, optional
        Added to reported error positions when ``text`` is a slice of a
        larger input. Defaults to 0.

    Returns
    -------
    LaurentPoly
        Parsed value in canonical form.

    Raises
    ------
    ParseError
        If ``text`` does not match the grammar.
    """
    return _PolyParser(text, offset).parse()


ZERO = lp_monomial(0, 0)
ONE = lp_monomial(1, 0)
A = lp_monomial(1, 1)


def A_pow(k: int, coeff: int = 1) -> LaurentPoly:
    """Shorthand for ``coeff * A^k``."""
    return lp_monomial(coeff, k)
