"""Rounds used by the parallel algorithm as the Latin instance grows."""

import numpy as np

from permlll.apps import ColorMatrix, latin_transversal
from permlll.parallel import ParallelConfig

for n in (64, 128, 256, 512):
    delta = (27 * n // 256) // 2
    rounds = []
    for seed in range(10):
        m = ColorMatrix.with_multiplicity(n, delta, seed)
        res = latin_transversal(m, parallel=ParallelConfig(seed=seed))
        rounds.append(res.outcome.parallel.rounds)
    print("n=%4d delta=%3d rounds: mean %.1f max %d" % (n, delta, np.mean(rounds), max(rounds)))
