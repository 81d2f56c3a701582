import pytest
from hypothesis import given
from hypothesis import strategies as st

from kbsm.annulus.exceptions import ParseError
from kbsm.annulus.laurent import A_pow
from kbsm.annulus.polyfam import LambdaPoly, ppoly, ppoly_k
from kbsm.annulus.words import (
    EMPTY_WORD,
    Annulus,
    FiberedTorus,
    GammaWord,
    ModuleElement,
    in_sigma_c,
    in_sigma_prime,
    parse_expression,
    splice,
    word_concat,
)

words = st.integers(min_value=0, max_value=3).flatmap(
    lambda k: st.builds(
        GammaWord,
        st.tuples(*[st.integers(min_value=0, max_value=3)] * (k + 1)),
        st.tuples(*[st.integers(min_value=-4, max_value=4)] * k),
    )
)
lambda_polys = st.dictionaries(
    st.integers(min_value=0, max_value=4), st.integers(min_value=-3, max_value=3), max_size=3
).map(LambdaPoly)


class TestGammaWord:
    """Test cases for words and their text form."""

    def test_shape_is_checked(self):
        """Test that a run count mismatch or a negative run raises ValueError."""
        with pytest.raises(ValueError, match="needs 2 lambda-runs"):
            GammaWord((0,), (1,))
        with pytest.raises(ValueError, match="non-negative"):
            GammaWord((-1,), ())

    def test_text(self):
        """Test word printing."""
        assert str(EMPTY_WORD) == "1"
        assert str(GammaWord.lam(3)) == "l^3"
        assert str(GammaWord((0, 2, 0), (2, 2))) == "x(2) l^2 x(2)"
        assert str(GammaWord.of("l", 5)) == "l x(5)"

    def test_concat_merges_seam(self):
        """Test that the outer run of a meets the inner run of b."""
        a = GammaWord((0, 1), (3,))
        b = GammaWord((2, 0), (1,))
        assert word_concat(a, b) == GammaWord((0, 3, 0), (3, 1))
        assert word_concat(a, EMPTY_WORD) == a


class TestModuleElement:
    """Test cases for linear combinations."""

    def test_print_order(self):
        """Test descending (k, x_indices, lambda_exps) print order."""
        e = ModuleElement({GammaWord.x(0): A_pow(2, -1), GammaWord((0, 1), (1,)): A_pow(1)})
        assert str(e) == "{A}*x(1) l + {-A^2}*x(0)"
        assert str(ModuleElement()) == "0"

    def test_zero_coefficients_dropped(self):
        """Test that cancelling terms vanish."""
        x = ModuleElement.from_word(GammaWord.x(1))
        assert not (x - x)
        assert len(x + x) == 1

    def test_records_round_trip(self):
        """Test the JSON record codec."""
        e = parse_expression("{-A^3}*l x(5) + {1}*x(2) l^2 x(2)")
        records = e.to_records()
        assert records[0] == {"coeff": "1", "word": "x(2) l^2 x(2)"}
        assert ModuleElement.from_records(records) == e

    @given(words, lambda_polys, lambda_polys)
    def test_splice_is_additive(self, w, p, q):
        """Test splice(w, pos, p + q) = splice(w, pos, p) + splice(w, pos, q)."""
        for pos in range(w.k + 1):
            assert splice(w, pos, p + q) == splice(w, pos, p) + splice(w, pos, q)

    def test_splice_out_of_range_raises_error(self):
        """Test that a missing gap raises ValueError."""
        with pytest.raises(ValueError, match="outside"):
            splice(GammaWord.x(1), 2, LambdaPoly.lam(1))


class TestBases:
    """Test cases for basis membership."""

    def test_sigma_c(self):
        """Test membership in Sigma_c."""
        assert in_sigma_c(GammaWord.lam(4), 0)
        assert in_sigma_c(GammaWord((0, 2, 0, 0), (0, 0, 0)), 0)
        assert in_sigma_c(GammaWord((0, 1, 0), (1, 0)), 0)
        assert not in_sigma_c(GammaWord((1, 0), (0,)), 0)
        assert not in_sigma_c(GammaWord((0, 0, 1), (0, 0)), 0)
        assert not in_sigma_c(GammaWord((0, 0, 0), (1, 1)), 0)

    def test_sigma_prime(self):
        """Test membership in Sigma'_nu."""
        assert in_sigma_prime(GammaWord((0, 3), (2,)), 2)
        assert not in_sigma_prime(GammaWord((0, 0, 0), (2, 2)), 2)
        assert not in_sigma_prime(GammaWord.x(3), 2)

    def test_spaces(self):
        """Test anchors and labels of the two spaces."""
        assert Annulus(-2).anchor == -2
        assert FiberedTorus(7).nu == 3
        assert FiberedTorus(7).anchor == 3
        assert str(Annulus(0)) == "annulus c=0"
        assert FiberedTorus(5).in_basis(GammaWord.x(2))


class TestParseExpression:
    """Test cases for the expression language."""

    def test_words_and_coefficients(self):
        """Test juxtaposition and braces."""
        e = parse_expression("{-A^3}*l x(5)")
        assert e == ModuleElement.from_word(GammaWord((1, 0), (5,)), A_pow(3, -1))
        assert parse_expression("x(-2)") == ModuleElement.from_word(GammaWord.x(-2))
        assert parse_expression("0") == ModuleElement()

    def test_signs(self):
        """Test leading and inner signs."""
        e = parse_expression("-x(1) + x(1) - l")
        assert e == ModuleElement.from_word(GammaWord.lam(1), -1)

    def test_macros(self):
        """Test that P, t and Q expand in place."""
        assert parse_expression("P(1)") == ModuleElement.from_lambda(ppoly(1))
        assert parse_expression("t(2,1)") == ModuleElement.from_lambda(ppoly_k(2, 1))
        assert parse_expression("x(0) P(0)") == ModuleElement.from_word(GammaWord.x(0), ppoly(0).coefficient(0))

    def test_printed_text_parses_back(self):
        """Test that element text re-parses."""
        e = parse_expression("{A}*x(1) l + {-A^2}*x(0) + {3A^-4+1}*l^2")
        assert parse_expression(str(e)) == e

    @pytest.mark.parametrize("text", ["x(", "x(1) +", "{A*x(1)", "y(2)", "{A}*"])
    def test_malformed_raises_parse_error(self, text):
        """Test that malformed expressions raise ParseError."""
        with pytest.raises(ParseError):
            parse_expression(text)
