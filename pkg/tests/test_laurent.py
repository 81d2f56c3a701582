import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from kbsm.annulus.exceptions import ParseError
from kbsm.annulus.laurent import ONE, ZERO, A_pow, LaurentPoly, lp_parse, lp_print

laurent_polys = st.dictionaries(
    st.integers(min_value=-8, max_value=8), st.integers(min_value=-5, max_value=5), max_size=5
).map(LaurentPoly)

SYM_A = sympy.Symbol("A")


def to_sympy(p: LaurentPoly):
    return sum((c * SYM_A**e for e, c in p.items()), sympy.Integer(0))


class TestLaurentArithmetic:
    """Ring axioms of Z[A, A^-1]."""

    @given(laurent_polys, laurent_polys)
    def test_addition_and_multiplication_commute(self, p, q):
        """Test that + and * are commutative."""
        assert p + q == q + p
        assert p * q == q * p

    @given(laurent_polys, laurent_polys, laurent_polys)
    @settings(max_examples=50)
    def test_associative_and_distributive(self, p, q, r):
        """Test associativity and distributivity."""
        assert (p + q) + r == p + (q + r)
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r

    @given(laurent_polys)
    def test_identities_and_inverse(self, p):
        """Test zero, one and additive inverse."""
        assert p + ZERO == p
        assert p * ONE == p
        assert p - p == ZERO
        assert not (p * ZERO)

    @given(laurent_polys, laurent_polys)
    @settings(max_examples=50)
    def test_product_matches_sympy(self, p, q):
        """Test multiplication against sympy's expansion."""
        assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0

    def test_unit_powers(self):
        """Test that negative powers exist only for units."""
        assert A_pow(3, -1) ** -1 == A_pow(-3, -1)
        assert A_pow(1) ** 0 == ONE
        with pytest.raises(ValueError, match="Only units have negative powers"):
            (A_pow(2) + A_pow(-2)) ** -1

    def test_valuation_and_degree(self):
        """Test valuation, degree and the zero polynomial errors."""
        p = A_pow(-2, 3) + A_pow(5)
        assert p.valuation() == -2
        assert p.degree() == 5
        with pytest.raises(ValueError):
            ZERO.degree()


class TestLaurentText:
    """Canonical printing and parsing."""

    def test_print_is_ascending(self):
        """Test canonical print order."""
        assert lp_print(A_pow(2, -1) + A_pow(-2, -1)) == "-A^-2-A^2"
        assert lp_print(A_pow(-4, 3) + ONE) == "3A^-4+1"
        assert lp_print(ZERO) == "0"
        assert lp_print(A_pow(1)) == "A"

    def test_parse_accepts_any_order(self):
        """Test that the parser normalizes term order and merges like terms."""
        assert lp_parse("-A^2-A^-2") == lp_parse("-A^-2-A^2")
        assert lp_parse("A + A - 2A") == ZERO
        assert lp_parse("2") == LaurentPoly({0: 2})

    @given(laurent_polys)
    def test_print_parses_back(self, p):
        """Test that printed text parses to the same value."""
        assert lp_parse(lp_print(p)) == p

    def test_parse_error_carries_position(self):
        """Test that malformed text raises ParseError with an offset."""
        with pytest.raises(ParseError) as err:
            lp_parse("A^x")
        assert err.value.position == 2
        with pytest.raises(ParseError):
            lp_parse("")
