"""Find a Latin transversal of a random color matrix and look at the run."""

import numpy as np

from permlll.apps import ColorMatrix, latin_transversal
from permlll.apps import validate
from permlll.engine import EngineConfig

n, delta = 128, 13  # every color appears exactly 13 times; 13 <= 27*128/256
matrix = ColorMatrix.with_multiplicity(n, delta, seed=1)
print("matrix", matrix.cells.shape, "max multiplicity", matrix.delta)

res = latin_transversal(matrix, EngineConfig(seed=42))
pi = np.array(res.result.forward)
colors = matrix.cells[np.arange(n), pi]  # colors picked up by the transversal
print("status", res.status, "resamples", res.outcome.stats.resamples)
print("distinct colors on the transversal:", len(np.unique(colors)), "of", n)
print("validator agrees:", validate.is_latin_transversal(matrix.rows, pi.tolist()))

# how many resamplings does it usually take?
counts = np.array([
    latin_transversal(matrix, EngineConfig(seed=s, record_log=False)).outcome.stats.resamples
    for s in range(50)
])
print("resamples over 50 seeds: mean %.1f, max %d" % (counts.mean(), counts.max()))
