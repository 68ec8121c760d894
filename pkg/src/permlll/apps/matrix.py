"""Square color matrices and their CSV format."""

from __future__ import annotations

import csv
import io
from collections import Counter

import numpy as np

from ..events import FormatError
from ..rng import Rng


class ColorMatrix:
    """An n×n grid of integer colors."""

    def __init__(self, cells):
        arr = np.asarray(cells, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"color matrix must be square and non-empty, got shape {arr.shape}")
        self.cells = arr
        self.n = arr.shape[0]
        self.rows: list[list[int]] = arr.tolist()
        self._index: dict[int, list[tuple[int, int]]] | None = None

    @property
    def index(self) -> dict[int, list[tuple[int, int]]]:
        """color → cells ``(row, col)`` holding it."""
        if self._index is None:
            idx: dict[int, list[tuple[int, int]]] = {}
            for i, row in enumerate(self.rows):
                for j, c in enumerate(row):
                    idx.setdefault(c, []).append((i, j))
            self._index = idx
        return self._index

    @property
    def delta(self) -> int:
        """Largest number of times any color occurs."""
        values, counts = np.unique(self.cells, return_counts=True)
        return int(counts.max())

    def colors(self) -> list[int]:
        return sorted(self.index)

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.rows[i][j]

    @classmethod
    def from_csv(cls, text: str) -> "ColorMatrix":
        rows = []
        for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([int(c) for c in row])
            except ValueError:
                raise FormatError(f"non-integer color in {row}", lineno) from None
            if len(rows[-1]) != len(rows[0]):
                raise FormatError(f"row has {len(rows[-1])} entries, expected {len(rows[0])}", lineno)
        if not rows:
            raise FormatError("empty matrix", 1)
        if len(rows) != len(rows[0]):
            raise FormatError(f"matrix is {len(rows)}x{len(rows[0])}, not square", len(rows))
        return cls(rows)

    def to_csv(self) -> str:
        return "\n".join(",".join(map(str, row)) for row in self.rows) + "\n"

    @classmethod
    def with_multiplicity(cls, n: int, delta: int, seed: int = 0) -> "ColorMatrix":
        """Random matrix in which every color occurs exactly ``delta`` times
        (the last color takes the remainder)."""
        if delta < 1:
            raise ValueError("delta must be >= 1")
        colors = [c // delta for c in range(n * n)]
        Rng.stream(seed, "matrix", n, delta).shuffle(colors)
        return cls(np.array(colors).reshape(n, n))

    @classmethod
    def distinct(cls, n: int) -> "ColorMatrix":
        return cls(np.arange(n * n).reshape(n, n))


def color_counts(matrix: ColorMatrix, perm_forward) -> Counter:
    return Counter(matrix.rows[i][j] for i, j in enumerate(perm_forward))
