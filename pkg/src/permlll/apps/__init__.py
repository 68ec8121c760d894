"""Application solvers built on the Swapping Algorithm."""

from .coloring import (
    BlockGraph,
    StrongColorOracle,
    independent_transversal,
    perfect_matching_graph,
    random_block_graph,
    strong_color_iterative,
    strong_color_permutation,
    strong_coloring_criterion,
)
from .common import CriterionFailed, SolveResult
from .matrix import ColorMatrix
from .packing import (
    Hypergraph,
    PackingOracle,
    minimal_packing_n,
    pack_hypergraphs,
    packing_criterion,
    random_hypergraph,
)
from .transversals import (
    ConjugateOracle,
    LatinOracle,
    STransversalOracle,
    conjugate_transversal,
    cycles_of_length,
    hitting_size,
    latin_criterion,
    latin_transversal,
    s_transversal,
    s_transversal_criterion,
)

__all__ = [
    "BlockGraph",
    "ColorMatrix",
    "ConjugateOracle",
    "CriterionFailed",
    "Hypergraph",
    "LatinOracle",
    "PackingOracle",
    "STransversalOracle",
    "SolveResult",
    "StrongColorOracle",
    "conjugate_transversal",
    "cycles_of_length",
    "hitting_size",
    "independent_transversal",
    "latin_criterion",
    "latin_transversal",
    "minimal_packing_n",
    "pack_hypergraphs",
    "packing_criterion",
    "perfect_matching_graph",
    "random_block_graph",
    "random_hypergraph",
    "s_transversal",
    "s_transversal_criterion",
    "strong_color_iterative",
    "strong_color_permutation",
    "strong_coloring_criterion",
]
