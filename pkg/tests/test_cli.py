import json

import pytest

from kbsm.annulus.cli import EXIT_INPUT, EXIT_OK, EXIT_REDUCTION, main, read_input
from kbsm.annulus.diagram import SliceDiagram
from kbsm.annulus.words import ModuleElement


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestReduceCommand:
    """Test cases for `kbsm reduce`."""

    @pytest.mark.parametrize(
        "argv,expected",
        [
            (["--space", "annulus", "--c", "0", "--expr", "x(2)"], "{A}*x(1) l + {-A^2}*x(0)"),
            (["--space", "fibered", "--beta", "5", "--expr", "x(3)"], "{-A^3}*x(2)"),
            (["--space", "annulus", "--c", "0", "--expr", "l^3"], "{1}*l^3"),
        ],
    )
    def test_reduce_expression(self, capsys, argv, expected):
        """Test printed normal forms."""
        code, out, _ = run(capsys, "reduce", "--no-cache", *argv)
        assert code == EXIT_OK
        assert out.strip() == expected

    def test_json_output_reparses(self, capsys):
        """Test that JSON output decodes back to the same element."""
        code, out, _ = run(capsys, "reduce", "--space", "annulus", "--c", "0", "--expr", "x(2)", "--format", "json")
        assert code == EXIT_OK
        records = json.loads(out)
        code, text, _ = run(capsys, "reduce", "--space", "annulus", "--c", "0", "--expr", "x(2)")
        assert str(ModuleElement.from_records(records)) == text.strip()

    def test_trace_goes_to_stderr(self, capsys):
        """Test that --trace writes rule applications to stderr."""
        code, out, err = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--expr", "x(3)", "--trace")
        assert code == EXIT_OK
        assert "rule=h" in err
        assert "fuel used:" in err
        assert "rule=" not in out

    def test_leftmost_strategy(self, capsys):
        """Test that --strategy leftmost prints the same normal form."""
        argv = ["reduce", "--no-cache", "--space", "annulus", "--c", "1", "--expr", "x(4) l x(-1)"]
        _, right, _ = run(capsys, *argv)
        _, left, _ = run(capsys, *argv, "--strategy", "leftmost")
        assert left == right

    def test_diagram_file(self, capsys, tmp_path, sample_diagram_text):
        """Test evaluating a diagram file through --in."""
        path = tmp_path / "circle.txt"
        path.write_text(sample_diagram_text)
        code, out, _ = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--in", str(path))
        assert code == EXIT_OK
        assert out.strip() == "{-A^3}*x(0) l"

    def test_expression_file_with_comments(self, capsys, tmp_path):
        """Test that # lines are skipped in expression files."""
        path = tmp_path / "case.txt"
        path.write_text("# kind confluence\n# space fibered beta=5\nx(3)\n")
        code, out, _ = run(capsys, "reduce", "--no-cache", "--space", "fibered", "--beta", "5", "--in", str(path))
        assert code == EXIT_OK
        assert out.strip() == "{-A^3}*x(2)"


class TestReduceExitCodes:
    """Test cases for the exit-code contract of `kbsm reduce`."""

    def test_parse_error(self, capsys):
        """Test that a malformed expression exits 2."""
        code, _, err = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--expr", "x(")
        assert code == EXIT_INPUT
        assert err.startswith("error:")

    def test_missing_space_parameter(self, capsys):
        """Test that the annulus without --c exits 2."""
        code, _, err = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--expr", "x(1)")
        assert code == EXIT_INPUT
        assert "requires c" in err

    def test_invalid_diagram(self, capsys, tmp_path):
        """Test that an unclosed diagram exits 2."""
        path = tmp_path / "open.txt"
        path.write_text("strands 0\ncap 1\n")
        code, _, _ = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--in", str(path))
        assert code == EXIT_INPUT

    def test_fuel_exhausted(self, capsys):
        """Test that running out of fuel exits 3."""
        code, _, err = run(capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--expr", "x(9)", "--fuel", "1")
        assert code == EXIT_REDUCTION
        assert "Fuel of 1" in err

    def test_crossing_cap(self, capsys, tmp_path):
        """Test that exceeding the crossing cap exits 3."""
        path = tmp_path / "twists.txt"
        path.write_text("strands 2\nx+ 1\nx+ 1\nx+ 1\n")
        code, _, _ = run(
            capsys, "reduce", "--no-cache", "--space", "annulus", "--c", "0", "--in", str(path), "--crossing-cap", "2"
        )
        assert code == EXIT_REDUCTION

    def test_bad_arguments_exit_from_argparse(self):
        """Test that argparse rejects a missing --space."""
        with pytest.raises(SystemExit) as err:
            main(["reduce", "--expr", "x(1)"])
        assert err.value.code == 2


class TestOtherCommands:
    """Test cases for verify, tables and fuzz."""

    def test_verify_polys(self, capsys):
        """Test that the polynomial suite passes."""
        code, out, _ = run(capsys, "verify", "--suite", "polys", "--n=-3..3", "--k", "0..2")
        assert code == EXIT_OK
        assert "P three-term recursion" in out

    def test_verify_json(self, capsys):
        """Test the machine-readable verify report."""
        code, out, _ = run(capsys, "verify", "--suite", "polys", "--n", "0..2", "--k", "1", "--format", "json")
        assert code == EXIT_OK
        rows = json.loads(out)
        assert rows and all(row["passed"] for row in rows)

    def test_verify_empty_grid(self, capsys):
        """Test that an empty grid is a vacuous pass."""
        code, out, _ = run(capsys, "verify", "--suite", "polys", "--n", "3..2", "--k", "3..2")
        assert code == EXIT_OK
        assert out == ""

    def test_verify_torus_small_grid(self, capsys):
        """Test the torus suite on one beta and a small grid."""
        code, _, _ = run(capsys, "verify", "--suite", "torus", "--beta", "3", "--n", "0..1", "--k", "0..1", "--cases", "5")
        assert code == EXIT_OK

    def test_tables_q(self, capsys):
        """Test the Q table as CSV."""
        code, out, _ = run(capsys, "tables", "--no-cache", "--family", "Q", "--n", "0..4")
        assert code == EXIT_OK
        lines = out.strip().splitlines()
        assert lines[0] == "family,n,k,value"
        assert lines[1] == "Q,0,,0"
        assert lines[5] == "Q,4,,(-2)*l^1 + (1)*l^3"

    def test_tables_p_with_k(self, capsys):
        """Test that P_{0,0} = P_0."""
        code, out, _ = run(capsys, "tables", "--no-cache", "--family", "P", "--n", "0", "--k", "0")
        assert code == EXIT_OK
        assert out.strip().splitlines()[1] == "P,0,0,(-A^-2-A^2)"

    def test_fuzz_zero_cases(self, capsys, tmp_path):
        """Test that --cases 0 exits 0 with an empty report."""
        code, out, _ = run(capsys, "fuzz", "--cases", "0", "--out", str(tmp_path / "corpus"))
        assert code == EXIT_OK
        assert out.strip() == "cases=0 failures=0"
        assert not (tmp_path / "corpus").exists()


class TestReadInput:
    def test_detects_diagrams(self, tmp_path, sample_diagram_text):
        """Test that a strands header selects the diagram reader."""
        path = tmp_path / "d.txt"
        path.write_text(sample_diagram_text)
        assert isinstance(read_input(path), SliceDiagram)
