"""Strong colorings of a block graph and an edge-disjoint hypergraph packing."""

import numpy as np

from permlll.apps import (
    minimal_packing_n,
    pack_hypergraphs,
    random_block_graph,
    random_hypergraph,
    strong_color_iterative,
    strong_color_permutation,
)
from permlll.apps import validate
from permlll.engine import EngineConfig

# 20 blocks of 29 vertices, max degree 3: one color permutation per block
g = random_block_graph(20, 29, 3, seed=5)
res = strong_color_permutation(g, EngineConfig(seed=0))
print("strong coloring:", res.status, "valid", validate.is_strong_coloring(g.n, g.edges, g.blocks, res.result))
print("swaps per block permutation:", np.mean(res.outcome.stats.swaps_per_perm))

# the same graph colored by growing a partial coloring one phase at a time
res = strong_color_iterative(g, EngineConfig(seed=0))
print("iterative:", res.status, "phases", res.extra["phases"])
print("colored after the first phases:", res.extra["colored_counts"][:8], "...")

# pack a random 3-uniform hypergraph with itself
h = random_hypergraph(30, 20, 3, seed=2)
n = minimal_packing_n(h, h)
res = pack_hypergraphs(h, h, n, EngineConfig(seed=3))
phi1, phi2 = res.result
print("packing into", n, "points:", res.status,
      "edge-disjoint", validate.is_edge_disjoint_packing(h.edges, h.edges, phi1, phi2, n))
