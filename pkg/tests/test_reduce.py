import numpy as np
import pytest

from kbsm.annulus.exceptions import FuelExhausted
from kbsm.annulus.fuzz import random_word
from kbsm.annulus.reduce import (
    RULE_LABELS,
    Reducer,
    ReductionTrace,
    Strategy,
    TraceStep,
    check_identity,
    rebase,
    reduce_c,
    reduce_nu,
)
from kbsm.annulus.words import Annulus, FiberedTorus, GammaWord, ModuleElement, parse_expression


class TestAnnulusRules:
    """Test cases for single rewrites in Sigma_c."""

    def test_basis_words_are_fixed(self):
        """Test that Sigma_c words reduce to themselves."""
        for text in ["l^3", "x(0) l^2 x(0) x(0)", "x(1) l x(0)", "1"]:
            e = parse_expression(text)
            assert reduce_c(e, 0) == e

    def test_x_above_c_plus_one(self):
        """Test x_2 = A x_1 l - A^2 x_0 for c = 0."""
        assert str(reduce_c(GammaWord.x(2), 0)) == "{A}*x(1) l + {-A^2}*x(0)"

    def test_x_below_c(self):
        """Test x_-1 = A^-1 x_0 l - A^-2 x_1 for c = 0."""
        assert str(reduce_c(GammaWord.x(-1), 0)) == "{-A^-2}*x(1) + {A^-1}*x(0) l"

    def test_lambda_inside_x(self):
        """Test l x_0 = (A - A^-3) x_1 + A^-2 x_0 l for c = 0."""
        assert str(reduce_c(parse_expression("l x(0)"), 0)) == "{-A^-3+A}*x(1) + {A^-2}*x(0) l"

    def test_first_rule_label(self):
        """Test the label of the rule applied at the outer end."""
        reducer = Reducer(Annulus(0))
        assert reducer.rewrite(GammaWord.x(2))[0] == "h"
        assert reducer.rewrite(GammaWord.x(-1))[0] == "i"
        assert reducer.rewrite(GammaWord((1, 0), (0,)))[0] == "g"
        assert reducer.rewrite(GammaWord((0, 0, 1, 0), (1, 3, 0)))[0] == "c"
        assert reducer.rewrite(GammaWord.x(0)) is None

    def test_linearity(self):
        """Test that reduction is R-linear."""
        a = parse_expression("{A^2}*x(3) l")
        b = parse_expression("{-1}*x(-2) x(4)")
        assert reduce_c(a + b, 0) == reduce_c(a, 0) + reduce_c(b, 0)


class TestNormalFormContract:
    """Test cases for the normal-form contract on random words."""

    @pytest.mark.parametrize("c", [-2, 0, 3])
    def test_random_words_land_in_basis_and_are_idempotent(self, c):
        """Test membership in Sigma_c and NF(NF(w)) = NF(w)."""
        rng = np.random.default_rng(11)
        reducer = Reducer(Annulus(c))
        for _ in range(60):
            nf = reducer.reduce(random_word(rng, c, max_k=4, spread=4, max_run=3))
            assert nf.supported_on(Annulus(c).in_basis)
            assert reducer.reduce(nf) == nf

    @pytest.mark.parametrize("c", [-2, 0, 3])
    def test_strategies_agree(self, c):
        """Test that right-anchored and leftmost-innermost orders agree."""
        rng = np.random.default_rng(5)
        right = Reducer(Annulus(c))
        left = Reducer(Annulus(c), strategy=Strategy.LEFTMOST_INNERMOST)
        for _ in range(40):
            w = random_word(rng, c, max_k=4, spread=4, max_run=3)
            assert right.reduce(w) == left.reduce(w)


class TestTraceAndFuel:
    def test_trace_records_and_replays(self):
        """Test that the trace replays to the normal form."""
        trace = ReductionTrace()
        e = parse_expression("x(4) l x(-1)")
        nf = reduce_c(e, 0, trace=trace)
        assert trace.steps
        assert trace.fuel_used == len(trace.steps)
        assert trace.lines()[0].startswith("rule=")
        assert trace.replay(e) == nf

    def test_trace_labels_are_rule_labels(self):
        """Test that every recorded step names one of the rules b-k."""
        trace = ReductionTrace()
        reduce_nu(parse_expression("x(4) l x(-1) x(2) x(3)"), 5, trace=trace)
        labels = {step.rule for step in trace.steps}
        assert labels and labels <= RULE_LABELS

    def test_unknown_trace_label_raises_error(self):
        """Test that a step with a foreign label is rejected."""
        with pytest.raises(ValueError, match="Unknown rule label"):
            TraceStep("z", GammaWord.x(2), ModuleElement())

    def test_fuel_exhaustion_raises_error(self):
        """Test that a tiny budget raises FuelExhausted."""
        with pytest.raises(FuelExhausted, match="Fuel of 1"):
            reduce_c(GammaWord.x(6), 0, fuel=1)

    def test_reducer_is_reusable_after_failure(self):
        """Test that a failed reduction leaves the memo usable."""
        reducer = Reducer(Annulus(0), fuel=2)
        with pytest.raises(FuelExhausted):
            reducer.reduce(GammaWord.x(7))
        assert reducer.reduce(GammaWord.x(2)) == reduce_c(GammaWord.x(2), 0)

    def test_non_positive_fuel_raises_error(self):
        """Test that fuel must be positive."""
        with pytest.raises(ValueError, match="fuel must be a positive integer"):
            Reducer(Annulus(0), fuel=0)


class TestIdentityAndRebase:
    def test_check_identity(self):
        """Test deciding equality through normal forms."""
        lhs = parse_expression("x(2)")
        rhs = parse_expression("{A}*x(1) l + {-A^2}*x(0)")
        assert check_identity(lhs, rhs, Annulus(0))
        failed = check_identity(lhs, parse_expression("x(0)"), Annulus(0))
        assert not failed
        assert failed.report().startswith("mismatch")

    def test_check_identity_rejects_foreign_reducer(self):
        """Test that a reducer for another space raises ValueError."""
        with pytest.raises(ValueError, match="cannot check identities"):
            check_identity(GammaWord.x(1), GammaWord.x(1), Annulus(0), Reducer(FiberedTorus(5)))

    @pytest.mark.parametrize("c_from,c_to", [(0, 3), (-2, 0), (3, -2)])
    def test_rebase_round_trip(self, c_from, c_to):
        """Test Sigma_{c_from} -> Sigma_{c_to} -> Sigma_{c_from} is the identity."""
        e = ModuleElement.from_word(GammaWord((0, 1, 0), (c_from + 1, c_from)))
        there = rebase(e, c_from, c_to)
        assert there.supported_on(Annulus(c_to).in_basis)
        assert rebase(there, c_to, c_from) == e

    def test_rebase_rejects_foreign_element(self):
        """Test that an element outside Sigma_{c_from} raises ValueError."""
        with pytest.raises(ValueError, match="not supported on"):
            rebase(parse_expression("x(5)"), 0, 1)
