"""Output checkers written without reference to the solvers' detectors."""

from __future__ import annotations

from collections.abc import Sequence


def _is_permutation(values: Sequence[int], n: int) -> bool:
    return len(values) == n and sorted(values) == list(range(n))


def max_color_count(rows: Sequence[Sequence[int]], pi: Sequence[int]) -> int:
    counts: dict[int, int] = {}
    for i, j in enumerate(pi):
        counts[rows[i][j]] = counts.get(rows[i][j], 0) + 1
    return max(counts.values(), default=0)


def is_latin_transversal(rows: Sequence[Sequence[int]], pi: Sequence[int]) -> bool:
    if not _is_permutation(pi, len(rows)):
        return False
    colors = [rows[i][pi[i]] for i in range(len(rows))]
    return len(set(colors)) == len(colors)


def is_s_transversal(rows: Sequence[Sequence[int]], pi: Sequence[int], s: int) -> bool:
    return _is_permutation(pi, len(rows)) and max_color_count(rows, pi) <= s


def cycle_lengths(pi: Sequence[int]) -> list[int]:
    seen = set()
    out = []
    for start in range(len(pi)):
        if start in seen:
            continue
        size, x = 0, start
        while x not in seen:
            seen.add(x)
            x = pi[x]
            size += 1
        out.append(size)
    return sorted(out)


def is_conjugate_transversal(rows, pi: Sequence[int], tau: Sequence[int]) -> bool:
    return is_latin_transversal(rows, pi) and cycle_lengths(pi) == cycle_lengths(tau)


def is_strong_coloring(
    n: int, edges: Sequence[tuple[int, int]], blocks: Sequence[Sequence[int]], color: Sequence[int]
) -> bool:
    if len(color) != n:
        return False
    b = len(blocks[0])
    for block in blocks:
        if sorted(color[v] for v in block) != list(range(b)):
            return False
    return all(color[u] != color[v] for u, v in edges)


def is_independent_transversal(
    edges: Sequence[tuple[int, int]], blocks: Sequence[Sequence[int]], chosen: Sequence[int]
) -> bool:
    if len(chosen) != len(blocks):
        return False
    if any(v not in block for v, block in zip(chosen, blocks)):
        return False
    picked = set(chosen)
    return not any(u in picked and v in picked for u, v in edges)


def is_edge_disjoint_packing(
    edges1: Sequence[Sequence[int]],
    edges2: Sequence[Sequence[int]],
    phi1: Sequence[int],
    phi2: Sequence[int],
    n: int,
) -> bool:
    for phi in (phi1, phi2):
        if len(set(phi)) != len(phi) or any(not 0 <= y < n for y in phi):
            return False
    images1 = {frozenset(phi1[v] for v in e) for e in edges1}
    return all(frozenset(phi2[v] for v in e) not in images1 for e in edges2)
