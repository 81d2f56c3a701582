import logging
import os
from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd
from dotenv import load_dotenv

from .. import __version__
from . import validators
from .cache import CacheManager
from .diagram import DEFAULT_CROSSING_CAP, SliceDiagram, evaluate, parse_diagram
from .fuzz import FuzzReport, run_fuzz
from .polyfam import family_value
from .reduce import DEFAULT_FUEL, Reducer, ReductionTrace, Strategy
from .suites import Grid, run_suites
from .words import Annulus, FiberedTorus, GammaWord, ModuleElement, ReductionConfig, parse_expression

load_dotenv()

log = logging.getLogger(__name__)

TABLE_COLUMNS = ["family", "n", "k", "value"]


def _setting(value: Optional[Union[int, str]], env: str, default: int) -> int:
    """Explicit value, then environment variable, then default."""
    if value is not None:
        return validators.validate_positive_int(env, value)
    raw = os.getenv(env)
    if raw:
        return validators.validate_positive_int(env, raw)
    return default


class Calculator:
    """Calculator for normal forms in the skein modules of the annulus times S^1
    and of the (beta, 2)-fibered torus.

    Parameters
    ----------
    fuel : Optional[int], optional
        Rule applications allowed per term. Defaults to KBSM_FUEL env variable or 1000000.
    crossing_cap : Optional[int], optional
        Largest crossing count accepted by state sums. Defaults to KBSM_CROSSING_CAP env variable or 20.
    use_cache : bool, optional
        Enable caching for reductions and tables. Defaults to True.
    cache_dir : Optional[str], optional
        Directory for cached files. Defaults to KBSM_CACHE_DIR env variable or 'cache'.

    Raises
    ------
    ValueError
        If fuel or crossing_cap is not a positive integer.

    """

    def __init__(
        self,
        fuel: Optional[int] = None,
        crossing_cap: Optional[int] = None,
        use_cache: bool = True,
        cache_dir: Optional[str] = None,
    ) -> None:
        self.__version__: str = __version__
        self.fuel: int = _setting(fuel, "KBSM_FUEL", DEFAULT_FUEL)
        self.crossing_cap: int = _setting(crossing_cap, "KBSM_CROSSING_CAP", DEFAULT_CROSSING_CAP)
        cache_dir = cache_dir or os.getenv("KBSM_CACHE_DIR") or "cache"

        # Initialize cache manager if caching is enabled
        self.cache = CacheManager(cache_dir) if use_cache else None
        self._reducers: dict[tuple[ReductionConfig, Strategy], Reducer] = {}

    def reducer(
        self, space: ReductionConfig, strategy: Union[Strategy, str] = Strategy.RIGHT_ANCHORED
    ) -> Reducer:
        """Shared reducer for ``space``; its memo table persists across calls."""
        key = (space, Strategy(strategy))
        if key not in self._reducers:
            self._reducers[key] = Reducer(space, self.fuel, Strategy(strategy))
        return self._reducers[key]

    def reduce(
        self,
        expr: Union[str, ModuleElement, GammaWord],
        space: ReductionConfig,
        strategy: Union[Strategy, str] = Strategy.RIGHT_ANCHORED,
        resp_format: str = "element",
        trace: Optional[ReductionTrace] = None,
    ) -> Union[ModuleElement, str, list]:
        """
        Reduce an expression onto the basis of ``space``.

        Parameters
        ----------
        expr : Union[str, ModuleElement, GammaWord]
            Expression text such as ``"{-A^3}*l x(5)"``, or a parsed value.
        space : ReductionConfig
            ``Annulus(c)`` or ``FiberedTorus(beta)``.
        strategy : Union[Strategy, str], optional
            ``"right"`` or ``"leftmost"``. Defaults to ``"right"``.
        resp_format : str, optional
            Response format ('element', 'text', or 'json'). Defaults to 'element'.
        trace : Optional[ReductionTrace], optional
            Collects every rule application; bypasses the cache and the
            shared memo so that all steps are recorded.

        Returns
        -------
        Union[ModuleElement, str, list]
            The normal form, its text, or its JSON records.

        Raises
        ------
        ValueError
            If resp_format is invalid.
        ParseError
            If ``expr`` does not parse.
        ReductionError
            If the reduction runs out of fuel or loops.

        """
        if resp_format not in ["element", "text", "json"]:
            raise ValueError("resp_format must be 'element', 'text', or 'json'")
        strategy = Strategy(strategy)
        e = parse_expression(expr) if isinstance(expr, str) else ModuleElement.coerce(expr)

        # Caching: attempt to load from cache first
        cache_key = None
        if self.cache and trace is None:
            cache_key = self.cache.generate_key("reduce", space, strategy.value, e)
            cached = self.cache.read(cache_key, "json")
            if cached is not None:
                log.debug(f"[reduce {space}] -- Loaded from cache")
                return self._format(ModuleElement.from_records(cached), resp_format)

        if trace is not None:
            result = Reducer(space, self.fuel, strategy, trace).reduce(e)
        else:
            result = self.reducer(space, strategy).reduce(e)
        if self.cache and cache_key:
            self.cache.write(cache_key, "json", result.to_records())
        return self._format(result, resp_format)

    @staticmethod
    def _format(result: ModuleElement, resp_format: str) -> Union[ModuleElement, str, list]:
        if resp_format == "text":
            return str(result)
        if resp_format == "json":
            return result.to_records()
        return result

    def evaluate(
        self,
        diagram: Union[str, Path, SliceDiagram],
        space: ReductionConfig,
        method: str = "states",
        resp_format: str = "element",
    ) -> Union[ModuleElement, str, list]:
        """
        Run a diagram through the pipeline of ``space``.

        Parameters
        ----------
        diagram : Union[str, Path, SliceDiagram]
            Diagram, diagram file text, or path to a diagram file.
        space : ReductionConfig
            ``Annulus(c)`` for psi_c, ``FiberedTorus(beta)`` for phi_beta.
        method : str, optional
            ``"states"`` or ``"skein"``. Defaults to ``"states"``.
        resp_format : str, optional
            Response format ('element', 'text', or 'json'). Defaults to 'element'.

        Returns
        -------
        Union[ModuleElement, str, list]
            The normal form in the chosen format.

        Raises
        ------
        ParseError
            If the diagram text does not parse.
        DiagramError
            If the diagram is invalid or has too many crossings.

        """
        if resp_format not in ["element", "text", "json"]:
            raise ValueError("resp_format must be 'element', 'text', or 'json'")
        if isinstance(diagram, Path):
            diagram = diagram.read_text()
        if isinstance(diagram, str):
            diagram = parse_diagram(diagram)
        result = evaluate(diagram, space, self.fuel, self.crossing_cap, method, self.reducer(space))
        log.debug(f"[evaluate {space}] -- {len(diagram.events)} events -> {len(result)} terms")
        return self._format(result, resp_format)

    def psi(self, diagram: Union[str, Path, SliceDiagram], c: int, **kwargs) -> Union[ModuleElement, str, list]:
        """psi_c of a diagram; keyword arguments as for :meth:`evaluate`."""
        return self.evaluate(diagram, Annulus(c), **kwargs)

    def phi(self, diagram: Union[str, Path, SliceDiagram], beta: int, **kwargs) -> Union[ModuleElement, str, list]:
        """phi_beta of a diagram; keyword arguments as for :meth:`evaluate`."""
        return self.evaluate(diagram, FiberedTorus(beta), **kwargs)

    def tables(
        self,
        family: str,
        n_values: Iterable[int],
        k_values: Optional[Iterable[int]] = None,
        resp_format: str = "dataframe",
    ) -> Union[pd.DataFrame, str]:
        """
        Tabulate Q_n, P_n or P_{n,k}.

        Parameters
        ----------
        family : str
            ``"Q"`` or ``"P"``.
        n_values : Iterable[int]
            Indices n.
        k_values : Optional[Iterable[int]], optional
            Indices k for P_{n,k}. Defaults to None, which tabulates P_n.
        resp_format : str, optional
            Response format ('dataframe', 'csv', or 'json'). Defaults to 'dataframe'.

        Returns
        -------
        Union[pd.DataFrame, str]
            Columns family, n, k, value; CSV or JSON text for those formats.

        Raises
        ------
        ValueError
            If the family or resp_format is invalid, or k is given for Q.

        """
        validators.validate_family(family)
        if resp_format not in ["dataframe", "csv", "json"]:
            raise ValueError("resp_format must be 'dataframe', 'csv', or 'json'")
        n_values = list(n_values)
        k_list = None if k_values is None else list(k_values)

        cache_key = None
        out: Optional[pd.DataFrame] = None
        if self.cache:
            cache_key = self.cache.generate_key("tables", family, n_values, k_list)
            out = self.cache.read(cache_key, "parquet")
            if out is not None:
                log.debug(f"[tables {family}] -- Loaded from cache")

        if out is None:
            rows = [
                (family, n, k, str(family_value(family, n, k)))
                for n in n_values
                for k in (k_list if k_list is not None else [None])
            ]
            out = pd.DataFrame(rows, columns=TABLE_COLUMNS)
            out["k"] = out["k"].astype("Int64")
            if self.cache and cache_key:
                self.cache.write(cache_key, "parquet", out)
        log.debug(f"[tables {family}] -- Found {len(out)} rows")

        if resp_format == "csv":
            return out.to_csv(index=False)
        if resp_format == "json":
            return out.to_json(orient="records")
        return out

    def verify(self, suite: str = "all", grid: Optional[Grid] = None) -> pd.DataFrame:
        """
        Run identity suites.

        Parameters
        ----------
        suite : str, optional
            ``polys``, ``annulus``, ``torus``, ``diagram`` or ``all``. Defaults to ``all``.
        grid : Optional[Grid], optional
            Parameter grids. Defaults to the calculator's fuel and crossing cap
            with the standard grids.

        Returns
        -------
        pd.DataFrame
            One row per identity: suite, identity, instances, failures, passed.

        """
        validators.validate_suite(suite)
        grid = grid or Grid(fuel=self.fuel, crossing_cap=self.crossing_cap)
        out = run_suites(suite, grid)
        log.debug(f"[verify {suite}] -- {int(out['failures'].sum()) if len(out) else 0} failures")
        return out

    def fuzz(
        self,
        cases: int,
        seed: int = 0,
        spaces: Optional[Iterable[ReductionConfig]] = None,
        out_dir: Optional[Union[str, Path]] = None,
    ) -> FuzzReport:
        """
        Run the differential fuzz harness.

        Parameters
        ----------
        cases : int
            Number of cases.
        seed : int, optional
            Random seed. Defaults to 0.
        spaces : Optional[Iterable[ReductionConfig]], optional
            Spaces to draw from. Defaults to the standard six.
        out_dir : Optional[Union[str, Path]], optional
            Where counterexample files are written. Defaults to None (not written).

        Returns
        -------
        FuzzReport
            Counts and failures.

        """
        if cases < 0:
            raise ValueError(f"cases must be non-negative, got {cases}")
        report = run_fuzz(cases, seed, spaces, self.fuel, self.crossing_cap)
        if out_dir is not None:
            paths = report.write_corpus(out_dir)
            log.debug(f"[fuzz] -- wrote {len(paths)} counterexamples to {out_dir}")
        return report
