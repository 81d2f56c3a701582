"""Polynomials in lambda over Z[A, A^-1] and the families Q_n, P_n, P_{n,k}.

P_n is the reduced value of a disk circle carrying n arrows and P_{n,k} the
value of an n-arrow circle drawn around k parallel lambda curves. Both are
memoized for indices of either sign.
"""

from functools import lru_cache
from typing import Iterator, Mapping, Optional, Union

from .laurent import ONE, ZERO, A_pow, LaurentPoly

Coefficient = Union["LambdaPoly", LaurentPoly, int]


class LambdaPoly:
    """An element of R[lambda], R = Z[A, A^-1].

    Parameters
    ----------
    coeffs : Optional[Mapping[int, LaurentPoly]], optional
        Map from lambda-degree to coefficient. Zero coefficients are dropped.
        Defaults to the zero polynomial.

    Raises
    ------
    ValueError
        If a degree is negative.
    """

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Optional[Mapping[int, Union[LaurentPoly, int]]] = None) -> None:
        items = []
        for deg, c in sorted((coeffs or {}).items()):
            if deg < 0:
                raise ValueError(f"lambda-degree must be non-negative, got {deg}")
            c = LaurentPoly.coerce(c)
            if c:
                items.append((deg, c))
        self._coeffs: tuple[tuple[int, LaurentPoly], ...] = tuple(items)
        self._hash: Optional[int] = None

    @classmethod
    def lam(cls, n: int = 1, coeff: Union[LaurentPoly, int] = 1) -> "LambdaPoly":
        """``coeff * lambda^n``."""
        return cls({n: coeff})

    @classmethod
    def constant(cls, r: Union[LaurentPoly, int]) -> "LambdaPoly":
        return cls({0: r})

    @classmethod
    def coerce(cls, value: Coefficient) -> "LambdaPoly":
        if isinstance(value, LambdaPoly):
            return value
        return cls.constant(value)

    def items(self) -> Iterator[tuple[int, LaurentPoly]]:
        return iter(self._coeffs)

    def coefficient(self, deg: int) -> LaurentPoly:
        for d, c in self._coeffs:
            if d == deg:
                return c
        return ZERO

    def degree(self) -> int:
        """Top lambda-degree; -1 for the zero polynomial."""
        return self._coeffs[-1][0] if self._coeffs else -1

    def leading(self) -> LaurentPoly:
        return self._coeffs[-1][1] if self._coeffs else ZERO

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (LaurentPoly, int)):
            other = LambdaPoly.constant(other)
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._coeffs)
        return self._hash

    def __neg__(self) -> "LambdaPoly":
        return LambdaPoly({d: -c for d, c in self._coeffs})

    def __add__(self, other: Coefficient) -> "LambdaPoly":
        return lam_add(self, LambdaPoly.coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Coefficient) -> "LambdaPoly":
        return lam_add(self, -LambdaPoly.coerce(other))

    def __rsub__(self, other: Coefficient) -> "LambdaPoly":
        return lam_add(LambdaPoly.coerce(other), -self)

    def __mul__(self, other: Coefficient) -> "LambdaPoly":
        if isinstance(other, LambdaPoly):
            return lam_mul(self, other)
        if isinstance(other, (LaurentPoly, int)):
            return lam_scale(self, LaurentPoly.coerce(other))
        return NotImplemented

    def __rmul__(self, other: Coefficient) -> "LambdaPoly":
        if isinstance(other, (LaurentPoly, int)):
            return lam_scale(self, LaurentPoly.coerce(other))
        return NotImplemented

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for deg, c in self._coeffs:
            parts.append(f"({c})" if deg == 0 else f"({c})*l^{deg}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LambdaPoly('{self}')"


def lam_add(p: LambdaPoly, q: LambdaPoly) -> LambdaPoly:
    acc = dict(p._coeffs)
    for d, c in q._coeffs:
        acc[d] = acc.get(d, ZERO) + c
    return LambdaPoly(acc)


def lam_mul(p: LambdaPoly, q: LambdaPoly) -> LambdaPoly:
    acc: dict[int, LaurentPoly] = {}
    for d1, c1 in p._coeffs:
        for d2, c2 in q._coeffs:
            acc[d1 + d2] = acc.get(d1 + d2, ZERO) + c1 * c2
    return LambdaPoly(acc)


def lam_scale(p: LambdaPoly, r: LaurentPoly) -> LambdaPoly:
    if not r:
        return LambdaPoly()
    return LambdaPoly({d: c * r for d, c in p._coeffs})


LAMBDA = LambdaPoly.lam(1)


def trivial_circle_factor() -> LaurentPoly:
    """Value -A^2 - A^-2 of an arrowless disk circle."""
    return A_pow(2, -1) + A_pow(-2, -1)


def kink_factor(sign: int) -> LaurentPoly:
    """Framing change of one kink: -A^3 for a positive kink, -A^-3 for a negative one."""
    if sign not in (1, -1):
        raise ValueError(f"Kink sign must be +1 or -1, got {sign}")
    return A_pow(3 * sign, -1)


@lru_cache(maxsize=None)
def qpoly(n: int) -> LambdaPoly:
    """Q_n with Q_0 = 0, Q_1 = 1, Q_{n+2} = lambda Q_{n+1} - Q_n and Q_{-n} = -Q_n.

    Examples
    --------
    >>> str(qpoly(3))
    '(-1) + (1)*l^2'
    """
    if n < 0:
        return -qpoly(-n)
    if n == 0:
        return LambdaPoly()
    if n == 1:
        return LambdaPoly.constant(ONE)
    return LAMBDA * qpoly(n - 1) - qpoly(n - 2)


@lru_cache(maxsize=None)
def ppoly(n: int) -> LambdaPoly:
    """P_n = -A^{n+2} Q_{n+1} + A^{n-2} Q_{n-1}."""
    return qpoly(n + 1) * A_pow(n + 2, -1) + qpoly(n - 1) * A_pow(n - 2)


def ppoly_by_recursion(n: int) -> LambdaPoly:
    """P_n from P_0 and P_1 through P_n = A lambda P_{n-1} - A^2 P_{n-2}.

    For negative n the recursion runs backward as
    P_{n-2} = A^-1 lambda P_{n-1} - A^-2 P_n. Used to cross-check
    :func:`ppoly`.

    Parameters
    ----------
    n : int
        Index of either sign.

    Returns
    -------
    LambdaPoly
        P_n.
    """
    lower = LambdaPoly.constant(trivial_circle_factor())
    upper = LambdaPoly.lam(1, A_pow(3, -1))
    if n == 0:
        return lower
    if n > 0:
        for _ in range(n - 1):
            lower, upper = upper, LAMBDA * upper * A_pow(1) - lower * A_pow(2)
        return upper
    # (lower, upper) = (P_{j}, P_{j+1}) walking down from j = 0
    for _ in range(-n):
        lower, upper = LAMBDA * lower * A_pow(-1) - upper * A_pow(-2), lower
    return lower


@lru_cache(maxsize=None)
def ppoly_k(n: int, k: int) -> LambdaPoly:
    """P_{n,k} = A P_{n+1,k-1} + A^-1 P_{n-1,k-1} with P_{n,0} = P_n.

    Raises
    ------
    ValueError
        If k is negative.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    if k == 0:
        return ppoly(n)
    return ppoly_k(n + 1, k - 1) * A_pow(1) + ppoly_k(n - 1, k - 1) * A_pow(-1)


def family_value(family: str, n: int, k: Optional[int] = None) -> LambdaPoly:
    """Look up Q_n, P_n or P_{n,k} by family name ``"Q"`` or ``"P"``."""
    if family == "Q":
        if k is not None:
            raise ValueError("The Q family takes no k index")
        return qpoly(n)
    if family == "P":
        return ppoly(n) if k is None else ppoly_k(n, k)
    raise ValueError(f"family must be 'Q' or 'P', got '{family}'")
