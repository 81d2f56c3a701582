"""Command-line front end, installed as the ``kbsm`` console script.

Exit codes: 0 success, 2 unparsable or invalid input, 3 reduction failure or
crossing cap exceeded, 4 failed verification or fuzz case.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Union

from . import validators
from .client import Calculator
from .diagram import SliceDiagram, parse_diagram
from .exceptions import CrossingLimitExceeded, DiagramError, ParseError, ReductionError
from .fuzz import DEFAULT_FUZZ_CASES
from .reduce import ReductionTrace, Strategy
from .suites import Grid
from .words import ModuleElement, ReductionConfig, parse_expression

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REDUCTION = 3
EXIT_FAILED = 4


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text", help="output format")
    common.add_argument("--fuel", type=int, default=None, help="rule applications allowed per term")
    common.add_argument("--crossing-cap", type=int, default=None, help="largest crossing count for state sums")
    common.add_argument("--no-cache", action="store_true", help="disable the on-disk cache")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    ap = argparse.ArgumentParser(
        prog="kbsm",
        description="Normal forms in the Kauffman bracket skein modules of A^2 x S^1 and of the fibered torus.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    red = sub.add_parser("reduce", parents=[common], help="reduce an expression or evaluate a diagram file")
    red.add_argument("--space", choices=validators.VALID_SPACES, required=True)
    red.add_argument("--c", type=int, default=None, help="annulus basis index")
    red.add_argument("--beta", type=int, default=None, help="fibering parameter")
    source = red.add_mutually_exclusive_group(required=True)
    source.add_argument("--expr", help="expression text, e.g. '{-A^3}*l x(5)'")
    source.add_argument("--in", dest="in_path", help="file holding an expression or a diagram")
    red.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.RIGHT_ANCHORED.value)
    red.add_argument("--trace", action="store_true", help="write every rule application to stderr")

    ver = sub.add_parser("verify", parents=[common], help="run identity suites")
    ver.add_argument("--suite", choices=validators.VALID_SUITES, default="all")
    ver.add_argument("--c", type=int, default=None, help="run annulus identities for this c only")
    ver.add_argument("--beta", type=int, default=None, help="run torus identities for this beta only")
    ver.add_argument("--n", dest="n_range", default=None, help="primary index range A..B")
    ver.add_argument("--k", dest="k_range", default=None, help="secondary index range A..B")
    ver.add_argument("--cases", type=int, default=Grid.cases, help="random words per space for the normal-form check")
    ver.add_argument("--diagrams", type=int, default=Grid.diagrams, help="random diagrams for the diagram suite")
    ver.add_argument("--seed", type=int, default=0)

    fz = sub.add_parser("fuzz", parents=[common], help="differential fuzzing")
    fz.add_argument("--cases", type=int, default=DEFAULT_FUZZ_CASES, help="cases; kinds and spaces rotate evenly")
    fz.add_argument("--seed", type=int, default=0)
    fz.add_argument("--out", default="fuzz_corpus", help="directory for counterexample files")

    tab = sub.add_parser("tables", parents=[common], help="tabulate Q_n, P_n or P_{n,k}")
    tab.add_argument("--family", choices=validators.VALID_FAMILIES, required=True)
    tab.add_argument("--n", dest="n_range", required=True, help="index range A..B")
    tab.add_argument("--k", dest="k_range", default=None, help="index range A..B for P_{n,k}")
    return ap


def read_input(path: Union[str, Path]) -> Union[ModuleElement, SliceDiagram]:
    """Read an ``--in`` file: a diagram if it opens with ``strands``, else an expression.

    ``#`` comment lines are skipped, so fuzz counterexample files replay as is.
    """
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.lstrip().startswith("#")]
    text = "\n".join(lines)
    tokens = text.split()
    if tokens and tokens[0] == "strands":
        return parse_diagram(text)
    return parse_expression(" ".join(tokens))


def _space(args: argparse.Namespace) -> ReductionConfig:
    return validators.validate_space(args.space, args.c, args.beta)


def cmd_reduce(args: argparse.Namespace, calc: Calculator) -> int:
    space = _space(args)
    fmt = "json" if args.format == "json" else "text"
    if args.in_path:
        value = read_input(args.in_path)
    else:
        value = parse_expression(args.expr)

    if isinstance(value, SliceDiagram):
        out = calc.evaluate(value, space, resp_format=fmt)
    else:
        trace = ReductionTrace() if args.trace else None
        out = calc.reduce(value, space, args.strategy, resp_format=fmt, trace=trace)
        if trace is not None:
            for line in trace.lines():
                print(line, file=sys.stderr)
            print(f"fuel used: {trace.fuel_used}", file=sys.stderr)
    print(json.dumps(out) if fmt == "json" else out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, calc: Calculator) -> int:
    grid = Grid(
        n_values=None if args.n_range is None else tuple(validators.parse_range(args.n_range)),
        k_values=None if args.k_range is None else tuple(validators.parse_range(args.k_range)),
        c_values=Grid.c_values if args.c is None else (args.c,),
        beta_values=Grid.beta_values if args.beta is None else (args.beta,),
        cases=args.cases,
        diagrams=args.diagrams,
        seed=args.seed,
        fuel=calc.fuel,
        crossing_cap=calc.crossing_cap,
    )
    report = calc.verify(args.suite, grid)
    if args.format == "json":
        print(report.to_json(orient="records"))
    elif len(report):
        print(report.to_string(index=False))
    passed = bool(report["passed"].all()) if len(report) else True
    return EXIT_OK if passed else EXIT_FAILED


def cmd_fuzz(args: argparse.Namespace, calc: Calculator) -> int:
    report = calc.fuzz(args.cases, args.seed, out_dir=args.out)
    if args.format == "json":
        print(json.dumps({"cases": report.cases, "counts": report.counts, "failures": len(report.failures)}))
    else:
        fields = [f"cases={report.cases}"] + [f"{kind}={n}" for kind, n in report.counts.items()]
        print(" ".join(fields + [f"failures={len(report.failures)}"]))
        if report.failures:
            print(report.to_frame().to_string(index=False))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_tables(args: argparse.Namespace, calc: Calculator) -> int:
    n_values = validators.parse_range(args.n_range)
    k_values = None if args.k_range is None else validators.parse_range(args.k_range)
    fmt = "json" if args.format == "json" else "csv"
    print(calc.tables(args.family, n_values, k_values, resp_format=fmt), end="" if fmt == "csv" else "\n")
    return EXIT_OK


COMMANDS = {
    "reduce": cmd_reduce,
    "verify": cmd_verify,
    "fuzz": cmd_fuzz,
    "tables": cmd_tables,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        calc = Calculator(fuel=args.fuel, crossing_cap=args.crossing_cap, use_cache=not args.no_cache)
        log.debug(f"[{args.command}] -- fuel {calc.fuel}, crossing cap {calc.crossing_cap}")
        return COMMANDS[args.command](args, calc)
    except (ReductionError, CrossingLimitExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REDUCTION
    except (ParseError, DiagramError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
