"""Packing two r-uniform hypergraphs into [n] with edge-disjoint images."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

from ..criteria import check_packing
from ..engine import EngineConfig, Instance
from ..events import BadEvent, FormatError, Tracker, ViolationOracle, _content_lines
from ..parallel import ParallelConfig
from ..rng import Rng
from .common import SolveResult, execute, gate, iteration_limit


class Hypergraph:
    """r-uniform hypergraph on ``range(vertices)``."""

    def __init__(self, vertices: int, edges: Iterable[Iterable[int]], r: int | None = None):
        edges = [tuple(sorted(e)) for e in edges]
        if r is None:
            r = len(edges[0]) if edges else 0
        for e in edges:
            if len(e) != r or len(set(e)) != r:
                raise ValueError(f"edge {e} is not an {r}-set")
            if any(not 0 <= v < vertices for v in e):
                raise ValueError(f"edge {e} has a vertex outside 0..{vertices - 1}")
        self.vertices = vertices
        self.edges = edges
        self.r = r

    @property
    def m(self) -> int:
        return len(self.edges)

    def intersection_degree(self) -> int:
        """Largest number of other edges any edge meets."""
        sets = [set(e) for e in self.edges]
        best = 0
        for i, a in enumerate(sets):
            best = max(best, sum(1 for j, b in enumerate(sets) if j != i and a & b))
        return best

    @classmethod
    def parse(cls, text: str) -> "Hypergraph":
        """``v e r`` header then e lines of r vertex ids (1-based)."""
        lines = list(_content_lines(text))
        if not lines:
            raise FormatError("empty hypergraph", 1)
        lineno, header = lines[0]
        try:
            v, e, r = (int(t) for t in header.split())
        except ValueError:
            raise FormatError("expected header 'v e r'", lineno) from None
        if len(lines) != 1 + e:
            raise FormatError(f"expected {e} edge lines, found {len(lines) - 1}", lines[-1][0])
        edges = []
        for lineno, line in lines[1:]:
            try:
                edge = [int(t) - 1 for t in line.split()]
            except ValueError:
                raise FormatError("expected vertex ids", lineno) from None
            if len(edge) != r or len(set(edge)) != r or any(not 0 <= x < v for x in edge):
                raise FormatError(f"edge must be {r} distinct ids in 1..{v}", lineno)
            edges.append(edge)
        return cls(v, edges, r)

    def format(self) -> str:
        out = [f"{self.vertices} {self.m} {self.r}"]
        out += [" ".join(str(x + 1) for x in e) for e in self.edges]
        return "\n".join(out) + "\n"


def random_hypergraph(vertices: int, m: int, r: int, seed: int = 0) -> Hypergraph:
    if m > math.comb(vertices, r):
        raise ValueError("more edges requested than r-sets exist")
    rng = Rng.stream(seed, "hypergraph", vertices, m, r)
    edges: set[tuple[int, ...]] = set()
    while len(edges) < m:
        edges.add(tuple(sorted(rng.sample(range(vertices), r))))
    return Hypergraph(vertices, sorted(edges), r)


def _perm_rank(order: Sequence[int]) -> int:
    """Lexicographic rank of a permutation of ``range(len(order))``."""
    rank = 0
    rest = sorted(order)
    for v in order:
        i = rest.index(v)
        rank = rank * len(rest) + i
        rest.pop(i)
    return rank


class PackingOracle(ViolationOracle):
    """Event ``(e1, e2, σ)``: φ2 maps e2's vertices onto e1 in the order σ.

    Only edge pairs are tracked; the live ordering of a pair is read off the
    permutation. Id is ``(i1·m2 + i2)·r! + rank(σ)``.
    """

    def __init__(self, h1: Hypergraph, h2: Hypergraph, n: int):
        if h1.r != h2.r and h1.m and h2.m:
            raise ValueError("hypergraphs must have the same edge size")
        if h1.vertices > n or h2.vertices > n:
            raise ValueError("n must be at least the vertex count of each hypergraph")
        self.h1, self.h2, self.n = h1, h2, n
        self.r = h2.r
        self.fact = math.factorial(self.r)
        self.lookup = {frozenset(e): i for i, e in enumerate(h1.edges)}
        self.edges_at: list[list[int]] = [[] for _ in range(n)]
        for i2, e in enumerate(h2.edges):
            for v in e:
                self.edges_at[v].append(i2)

    def event(self, i1: int, i2: int, f: Sequence[int]) -> BadEvent:
        e1, e2 = self.h1.edges, self.h2.edges
        target = e1[i1]
        images = [f[v] for v in e2[i2]]
        sigma = [target.index(y) for y in images]
        eid = (i1 * self.h2.m + i2) * self.fact + _perm_rank(sigma)
        return BadEvent(eid, [(0, v, y) for v, y in zip(e2[i2], images)], "pair", False)

    def hit(self, i2: int, f: Sequence[int]) -> int | None:
        return self.lookup.get(frozenset(f[v] for v in self.h2.edges[i2]))

    def all_true(self, perms):
        f = perms[0].forward
        out = []
        for i2 in range(self.h2.m):
            i1 = self.hit(i2, f)
            if i1 is not None:
                out.append(self.event(i1, i2, f))
        return sorted(out, key=lambda e: e.id)

    def explicit_events(self) -> list[BadEvent]:
        from itertools import permutations

        out = []
        for i1, e1 in enumerate(self.h1.edges):
            for i2, e2 in enumerate(self.h2.edges):
                for sigma in permutations(range(self.r)):
                    eid = (i1 * self.h2.m + i2) * self.fact + _perm_rank(sigma)
                    out.append(BadEvent(eid, [(0, v, e1[s]) for v, s in zip(e2, sigma)], "pair"))
        return sorted(out, key=lambda e: e.id)

    def tracker(self, perms):
        return _PackingTracker(self, perms)


class _PackingTracker(Tracker):
    def __init__(self, oracle: PackingOracle, perms):
        super().__init__(oracle, perms)
        self.f = perms[0].forward
        self.bad: dict[int, int] = {}
        for i2 in range(oracle.h2.m):
            i1 = oracle.hit(i2, self.f)
            if i1 is not None:
                self.bad[i2] = i1

    def touched(self, k, positions):
        oracle, f, bad = self.oracle, self.f, self.bad
        for p in positions:
            for i2 in oracle.edges_at[p]:
                i1 = oracle.hit(i2, f)
                if i1 is None:
                    bad.pop(i2, None)
                else:
                    bad[i2] = i1

    def true_events(self):
        out = [self.oracle.event(i1, i2, self.f) for i2, i1 in self.bad.items()]
        return sorted(out, key=lambda e: e.id)

    def first_true(self):
        if not self.bad:
            return None
        i2 = min(self.bad, key=lambda i: (self.bad[i], i))
        return self.oracle.event(self.bad[i2], i2, self.f)


def packing_criterion(h1: Hypergraph, h2: Hypergraph, n: int) -> dict:
    d1, d2 = h1.intersection_degree(), h2.intersection_degree()
    r = h2.r or h1.r
    return {
        "name": "packing",
        "m1": h1.m,
        "m2": h2.m,
        "d1": d1,
        "d2": d2,
        "n": n,
        "r": r,
        "satisfied": check_packing(h1.m, h2.m, d1, d2, n, r),
    }


def minimal_packing_n(h1: Hypergraph, h2: Hypergraph) -> int:
    """Smallest n ≥ both vertex counts that passes the packing criterion."""
    d1, d2 = h1.intersection_degree(), h2.intersection_degree()
    r = h2.r or h1.r
    n = max(h1.vertices, h2.vertices, r)
    while not check_packing(h1.m, h2.m, d1, d2, n, r):
        n += 1
    return n


def pack_hypergraphs(
    h1: Hypergraph,
    h2: Hypergraph,
    n: int,
    config: EngineConfig | None = None,
    force: bool = False,
    parallel: ParallelConfig | None = None,
) -> SolveResult:
    """Injections ``(φ1, φ2)`` into ``range(n)`` with no shared edge image.

    φ1 is the identity; φ2 is the first ``h2.vertices`` entries of a
    permutation of ``range(n)`` (the rest are unused dummies).
    """
    oracle = PackingOracle(h1, h2, n)
    criterion = packing_criterion(h1, h2, n)
    gate(criterion, force)
    outcome = execute(Instance([n], oracle, "pack"), config, parallel)
    if not outcome.success:
        return iteration_limit(criterion, outcome)
    phi1 = list(range(h1.vertices))
    phi2 = outcome.perms[0].forward[: h2.vertices]
    return SolveResult(outcome.status, (phi1, phi2), criterion, outcome)
