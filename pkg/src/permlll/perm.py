"""Permutations with a maintained inverse, and the randomized Swap step.

Indices are 0-based here; files and reports convert to 1-based at the edges.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .rng import Rng

# Re-verify forward/inverse consistency after every mutation (slow; tests only).
CHECK_INVARIANTS = False


def set_invariant_checks(enabled: bool) -> None:
    global CHECK_INVARIANTS
    CHECK_INVARIANTS = enabled


class Permutation:
    """A bijection on ``range(n)`` stored as ``forward`` and ``inverse`` lists."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward: Iterable[int]):
        forward = list(forward)
        n = len(forward)
        inverse = [-1] * n
        for x, y in enumerate(forward):
            if not 0 <= y < n or inverse[y] != -1:
                raise ValueError(f"not a permutation of range({n}): {forward}")
            inverse[y] = x
        self.forward = forward
        self.inverse = inverse

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_one_based(cls, values: Iterable[int]) -> "Permutation":
        return cls(v - 1 for v in values)

    @property
    def n(self) -> int:
        return len(self.forward)

    def __len__(self) -> int:
        return len(self.forward)

    def __call__(self, x: int) -> int:
        return self.forward[x]

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return self.forward == other.forward
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self.forward))

    def __repr__(self) -> str:
        return f"Permutation({self.forward})"

    def copy(self) -> "Permutation":
        p = Permutation.__new__(Permutation)
        p.forward = self.forward.copy()
        p.inverse = self.inverse.copy()
        return p

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.forward)

    def to_one_based(self) -> list[int]:
        return [y + 1 for y in self.forward]

    def swap_entries(self, x: int, z: int) -> None:
        """Exchange the values at domain points ``x`` and ``z`` (π ← π∘(x z))."""
        f = self.forward
        a = f[x]
        b = f[z]
        f[x] = b
        f[z] = a
        inv = self.inverse
        inv[a] = z
        inv[b] = x

    def check(self) -> None:
        f, inv = self.forward, self.inverse
        n = len(f)
        if len(inv) != n:
            raise AssertionError("forward/inverse length mismatch")
        for x in range(n):
            if not 0 <= f[x] < n or inv[f[x]] != x:
                raise AssertionError(f"inverse out of sync at {x}: {f} / {inv}")

    def cycle_type(self) -> list[int]:
        """Sorted cycle lengths."""
        seen = [False] * self.n
        lengths = []
        for start in range(self.n):
            if seen[start]:
                continue
            length = 0
            x = start
            while not seen[x]:
                seen[x] = True
                x = self.forward[x]
                length += 1
            lengths.append(length)
        return sorted(lengths)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: x ↦ self(other(x))."""
        f = self.forward
        return Permutation(f[y] for y in other.forward)

    def inverted(self) -> "Permutation":
        return Permutation(self.inverse)


def random_permutation(n: int, rng: Rng) -> Permutation:
    """Uniform permutation of ``range(n)`` by a full Fisher-Yates shuffle."""
    if n < 0:
        raise ValueError("n must be non-negative")
    forward = list(range(n))
    below = rng.below
    for i in range(n - 1, 0, -1):
        j = below(i + 1)
        forward[i], forward[j] = forward[j], forward[i]
    p = Permutation.__new__(Permutation)
    p.forward = forward
    inverse = [0] * n
    for x, y in enumerate(forward):
        inverse[y] = x
    p.inverse = inverse
    return p


def _check_points(points: Sequence[int], n: int, what: str) -> None:
    for p in points:
        if not 0 <= p < n:
            raise ValueError(f"{what} {p} out of range for n={n}")
    if len(set(points)) != len(points):
        raise ValueError(f"duplicate {what}s in {list(points)}")


def _kth_outside(j: int, excluded: list[int]) -> int:
    # j-th element (0-based, increasing order) of range(n) minus `excluded`
    for e in sorted(excluded):
        if e <= j:
            j += 1
        else:
            break
    return j


def swap(pi: Permutation, xs: Sequence[int], rng: Rng) -> list[int]:
    """Resample ``pi`` at domain points ``xs`` (partial Fisher-Yates).

    For each ``x_i`` in order, a mate is drawn uniformly from ``range(n)``
    minus the earlier points ``x_1..x_{i-1}`` and the two entries are
    exchanged. Returns the mates, in order.
    """
    n = len(pi.forward)
    _check_points(xs, n, "domain point")
    mates = []
    below = rng.below
    for i, x in enumerate(xs):
        z = _kth_outside(below(n - i), xs[:i]) if i else below(n)
        pi.swap_entries(x, z)
        mates.append(z)
    if CHECK_INVARIANTS:
        pi.check()
    return mates


def draw_mates(n: int, xs: Sequence[int], rng: Rng) -> list[int]:
    """The mates :func:`swap` would draw for ``xs``, without touching any permutation.

    Mate choice never looks at the permutation, so drawing first and then
    calling :func:`swap_with_mates` is the same as :func:`swap`.
    """
    _check_points(xs, n, "domain point")
    below = rng.below
    return [_kth_outside(below(n - i), xs[:i]) if i else below(n) for i in range(len(xs))]


def swap_with_mates(pi: Permutation, xs: Sequence[int], mates: Sequence[int]) -> None:
    """Replay a :func:`swap` with pre-chosen mates."""
    n = len(pi.forward)
    _check_points(xs, n, "domain point")
    if len(mates) != len(xs):
        raise ValueError("need exactly one mate per domain point")
    for i, (x, z) in enumerate(zip(xs, mates)):
        if not 0 <= z < n or z in xs[:i]:
            raise ValueError(f"mate {z} not allowed for step {i}")
        pi.swap_entries(x, z)
    if CHECK_INVARIANTS:
        pi.check()


def swap_range(pi: Permutation, ys: Sequence[int], rng: Rng) -> list[int]:
    """Range-side twin of :func:`swap`: mates are values, not positions.

    For each ``y_i`` in order, ``y'_i`` is drawn uniformly from ``range(n)``
    minus ``y_1..y_{i-1}`` and the entries at ``π⁻¹(y_i)`` and ``π⁻¹(y'_i)``
    are exchanged. Returns the value mates.
    """
    n = len(pi.forward)
    _check_points(ys, n, "range value")
    inv = pi.inverse
    mates = []
    for i, y in enumerate(ys):
        w = _kth_outside(rng.below(n - i), ys[:i]) if i else rng.below(n)
        pi.swap_entries(inv[y], inv[w])
        mates.append(w)
    if CHECK_INVARIANTS:
        pi.check()
    return mates


def apply_transpositions(pi: Permutation, ts: Sequence[tuple[int, int]]) -> None:
    """Set ``pi ← pi·(x_l z_l)···(x_1 z_1)``; the first pair acts first on the domain.

    In terms of entry exchanges this performs the pairs in reverse order.
    """
    n = len(pi.forward)
    for x, z in ts:
        if not (0 <= x < n and 0 <= z < n):
            raise ValueError(f"transposition ({x} {z}) out of range for n={n}")
    for x, z in reversed(ts):
        if x != z:
            pi.swap_entries(x, z)
    if CHECK_INVARIANTS:
        pi.check()
