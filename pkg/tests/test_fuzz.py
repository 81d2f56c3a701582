import numpy as np
import pytest

import kbsm.annulus.diagram as diagram
import kbsm.annulus.fuzz as fuzz
from kbsm.annulus.cli import EXIT_FAILED, main, read_input
from kbsm.annulus.diagram import SliceDiagram, cross_pos, resolve_skein, resolve_states
from kbsm.annulus.fuzz import (
    DEFAULT_FUZZ_CASES,
    DEFAULT_MAX_CROSSINGS,
    DEFAULT_SPACES,
    FuzzFailure,
    FuzzReport,
    random_diagram,
    random_move,
    random_word,
    run_fuzz,
)
from kbsm.annulus.laurent import A_pow
from kbsm.annulus.moves import Move, Site, _inserts, applicable_sites
from kbsm.annulus.validators import validate_diagram
from kbsm.annulus.words import Annulus, FiberedTorus


@pytest.fixture
def one_crossing():
    """Two strands with a single positive crossing."""
    return SliceDiagram(2, (cross_pos(1),))


@pytest.fixture
def swapped_weights(monkeypatch):
    """Exchange the two smoothing weights of the recursive resolver."""
    monkeypatch.setattr(diagram, "SKEIN_WEIGHTS", (A_pow(-1), A_pow(1)))


class TestGenerators:
    """Test cases for the seeded generators."""

    def test_random_words_respect_bounds(self):
        """Test generator bounds on x count, index spread and lambda runs."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            w = random_word(rng, anchor=2, max_k=4, spread=3, max_run=2)
            assert w.k <= 4
            assert all(-1 <= m <= 5 for m in w.x_indices)
            assert all(0 <= n <= 2 for n in w.lambda_exps)

    def test_random_diagrams_are_valid(self):
        """Test that every generated diagram closes up."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = random_diagram(rng, max_crossings=4)
            assert validate_diagram(d) == []
            assert len(d.crossings()) <= 4

    def test_default_diagrams_allow_ten_crossings(self):
        """Test that the default crossing bound is 10 and is reached."""
        rng = np.random.default_rng(2)
        counts = [len(random_diagram(rng, max_events=40).crossings()) for _ in range(100)]
        assert max(counts) == DEFAULT_MAX_CROSSINGS == 10

    def test_same_seed_same_draws(self):
        """Test determinism by seed."""
        a, b = np.random.default_rng(11), np.random.default_rng(11)
        assert [random_word(a) for _ in range(5)] == [random_word(b) for _ in range(5)]
        assert random_diagram(a) == random_diagram(b)

    def test_only_insertions_on_a_bare_strand(self):
        """Test that only insertions apply to an eventless strand."""
        rng = np.random.default_rng(0)
        for _ in range(20):
            picked = random_move(rng, SliceDiagram(1))
            assert picked is not None
            move, site = picked
            assert _inserts(move, site.inverse)

    def test_arrow_cancel_inserts_in_inverse_direction(self):
        """Test that the inverse arrow cancel is the insertion on a bare strand."""
        assert _inserts(Move.ARROW_CANCEL, True)
        assert not _inserts(Move.ARROW_CANCEL, False)
        assert Site(0, 1, inverse=True) in applicable_sites(SliceDiagram(1), Move.ARROW_CANCEL)


class TestRunFuzz:
    """Test cases for the differential harness."""

    def test_zero_cases(self):
        """Test that zero cases is an empty passing run."""
        report = run_fuzz(0)
        assert report.passed
        assert report.counts == {}
        assert report.to_frame().empty

    def test_small_run_passes(self):
        """Test that kinds rotate and nothing fails."""
        report = run_fuzz(12, seed=4, spaces=[Annulus(1), FiberedTorus(3)], max_crossings=4)
        assert report.passed
        assert report.counts == {"confluence": 4, "oracle": 4, "move": 4}

    def test_spaces_rotate_evenly(self, monkeypatch):
        """Test that every kind visits every space equally often."""
        spaces = [Annulus(0), FiberedTorus(3)]
        seen = []
        original = fuzz._Harness.confluence

        def recording(self, space):
            seen.append(space)
            return original(self, space)

        monkeypatch.setattr(fuzz._Harness, "confluence", recording)
        run_fuzz(12, seed=1, spaces=spaces, max_crossings=2)
        assert seen == [Annulus(0), FiberedTorus(3), Annulus(0), FiberedTorus(3)]

    def test_same_seed_same_report(self):
        """Test that a run is reproducible from its seed."""
        first = run_fuzz(6, seed=9, spaces=[Annulus(0)], max_crossings=3)
        second = run_fuzz(6, seed=9, spaces=[Annulus(0)], max_crossings=3)
        assert first.counts == second.counts
        assert first.failures == second.failures


class TestSelfTest:
    """A broken resolver must be caught."""

    def test_swapped_weights_break_the_oracle(self, one_crossing, swapped_weights):
        """Test that the state sum and the recursive form now disagree."""
        assert resolve_states(one_crossing) != resolve_skein(one_crossing)

    def test_fuzz_reports_the_mismatch(self, monkeypatch, one_crossing, swapped_weights, tmp_path):
        """Test that oracle cases fail and land in the corpus."""
        monkeypatch.setattr(fuzz, "random_diagram", lambda rng, **kw: one_crossing)
        report = run_fuzz(3, seed=0, spaces=[Annulus(0)])
        assert not report.passed
        assert [f.kind for f in report.failures] == ["oracle"]
        paths = report.write_corpus(tmp_path)
        assert [p.name for p in paths] == ["case-00001-oracle.txt"]
        assert read_input(paths[0]) == one_crossing

    def test_cli_exits_with_failure(self, monkeypatch, capsys, one_crossing, swapped_weights, tmp_path):
        """Test that `kbsm fuzz` exits 4 and writes the corpus."""
        monkeypatch.setattr(fuzz, "random_diagram", lambda rng, **kw: one_crossing)
        out_dir = tmp_path / "corpus"
        code = main(["fuzz", "--no-cache", "--cases", "3", "--out", str(out_dir)])
        out, _ = capsys.readouterr()
        assert code == EXIT_FAILED
        assert "failures=1" in out
        assert (out_dir / "case-00001-oracle.txt").exists()


class TestFailureFiles:
    def test_render_header_and_body(self):
        """Test the comment header and the replayable body."""
        failure = FuzzFailure(7, "confluence", "annulus c=0", "right=x\nleftmost=y", "x(3) l\n")
        assert failure.render() == "# kind confluence\n# space annulus c=0\n# right=x\n# leftmost=y\nx(3) l\n"

    def test_empty_report_writes_nothing(self, tmp_path):
        """Test that a passing report creates no directory."""
        assert FuzzReport(cases=5).write_corpus(tmp_path / "none") == []
        assert not (tmp_path / "none").exists()


@pytest.mark.slow
class TestAcceptanceScale:
    """Default-size run; deselected unless run with ``-m slow``."""

    def test_default_run_passes(self):
        """Test a thousand cases of each kind per default space."""
        report = run_fuzz(DEFAULT_FUZZ_CASES)
        assert report.passed, report.to_frame()
        per_kind = 1000 * len(DEFAULT_SPACES)
        assert report.counts == {"confluence": per_kind, "oracle": per_kind, "move": per_kind}
