"""Kauffman bracket skein module calculator for A^2 x S^1 and the (beta, 2)-fibered torus."""

from .cache import CacheManager
from .client import Calculator
from .diagram import SliceDiagram, embed_word, parse_diagram, phi_beta, psi_c
from .reduce import Reducer, check_identity, rebase, reduce_c, reduce_nu
from .words import Annulus, FiberedTorus, GammaWord, ModuleElement, parse_expression

__all__ = [
    "Calculator",
    "CacheManager",
    "Annulus",
    "FiberedTorus",
    "GammaWord",
    "ModuleElement",
    "parse_expression",
    "Reducer",
    "reduce_c",
    "reduce_nu",
    "rebase",
    "check_identity",
    "SliceDiagram",
    "parse_diagram",
    "psi_c",
    "phi_beta",
    "embed_word",
]
