"""Round-by-round simulation of the Parallel Swapping Algorithm.

Each round takes the currently true events. Each sub-round picks a maximal
independent set of them, draws swap mates without applying them, ranks the
set at random, and keeps the lexicographically-first MIS of the conflict
graph "a mate of B is a source of B'". The survivors' swaps are applied
as one batch of transpositions per permutation.

Parallel time is reported as rounds, sub-rounds and peel depth; nothing
here is a wall-clock claim.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

from .engine import ITERATION_LIMIT, SUCCESS, Instance, LogEntry, Outcome, RunStats, initial_permutations
from .events import LOPSIDED, STANDARD, BadEvent, depends, is_true
from .perm import Permutation, apply_transpositions, draw_mates
from .rng import Rng


def _slices(event: BadEvent):
    for k, x, y in event.triples:
        yield (k, 0, x)
        yield (k, 1, y)


def greedy_mis(events: Sequence[BadEvent], mode: str, rng: Rng) -> list[BadEvent]:
    """Maximal independent set under ~, scanning ``events`` in random order."""
    order = list(events)
    rng.shuffle(order)
    chosen: list[BadEvent] = []
    if mode == STANDARD:
        used: set = set()
        for e in order:
            sl = list(_slices(e))
            if not any(s in used for s in sl):
                chosen.append(e)
                used.update(sl)
    elif mode == LOPSIDED:
        for e in order:
            if not any(depends(e, c, mode) for c in chosen):
                chosen.append(e)
    else:
        raise ValueError(f"unknown dependency mode {mode!r}")
    return chosen


def _dependent_on(group: list[BadEvent], mode: str):
    """Predicate ``e ~ some member of group``."""
    if mode == STANDARD:
        used = {s for b in group for s in _slices(b)}
        return lambda e: any(s in used for s in _slices(e))
    return lambda e: any(depends(e, b, mode) for b in group)


class ConflictGraph:
    """Directed graph on vertices ``0..size-1``."""

    def __init__(self, size: int, edges=()):
        self.size = size
        self.succ: list[set[int]] = [set() for _ in range(size)]
        self.pred: list[set[int]] = [set() for _ in range(size)]
        for a, b in edges:
            self.add_edge(a, b)

    def add_edge(self, a: int, b: int) -> None:
        if a == b:
            raise ValueError("self-loop in conflict graph")
        self.succ[a].add(b)
        self.pred[b].add(a)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a in range(self.size) for b in self.succ[a])


def peel_lfmis(g: ConflictGraph) -> tuple[set[int], int]:
    """LFMIS by repeated source peeling; returns ``(set, number of peels)``.

    Each peel takes every source and deletes the sources together with
    their successors.
    """
    alive = set(range(g.size))
    indeg = [len(p) for p in g.pred]
    chosen: set[int] = set()
    depth = 0
    while alive:
        sources = [v for v in alive if indeg[v] == 0]
        if not sources:
            raise RuntimeError("conflict graph has a cycle")
        depth += 1
        removed = set(sources)
        for v in sources:
            removed.update(w for w in g.succ[v] if w in alive)
        chosen.update(sources)
        for v in removed:
            alive.discard(v)
        for v in removed:
            for w in g.succ[v]:
                indeg[w] -= 1
    return chosen, depth


def _check_orientation(g: ConflictGraph, rank: Sequence[int]) -> None:
    for a in range(g.size):
        for b in g.succ[a]:
            if rank[a] >= rank[b]:
                raise RuntimeError(f"edge {a}->{b} runs against the ranking")


def lfmis(g: ConflictGraph, rank: Sequence[int]) -> set[int]:
    """Lexicographically-first MIS with respect to ``rank`` (vertex → position)."""
    _check_orientation(g, rank)
    return peel_lfmis(g)[0]


def lfmis_reference(g: ConflictGraph, rank: Sequence[int]) -> set[int]:
    """Definitional LFMIS: scan by rank, keep a vertex unless a kept vertex points to it."""
    _check_orientation(g, rank)
    kept: set[int] = set()
    for v in sorted(range(g.size), key=lambda v: rank[v]):
        if not (g.pred[v] & kept):
            kept.add(v)
    return kept


@dataclass
class ParallelConfig:
    seed: int = 0
    max_rounds: int = 1000
    mode: str = STANDARD

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")


@dataclass
class ParallelStats:
    rounds: int = 0
    subrounds: list[int] = field(default_factory=list)
    peel_depths: list[int] = field(default_factory=list)
    transpositions: int = 0
    conflicts_dropped: int = 0

    def to_json(self) -> dict:
        return {
            "rounds": self.rounds,
            "subrounds": list(self.subrounds),
            "peel_depths": list(self.peel_depths),
            "transpositions": self.transpositions,
        }


@dataclass
class ParallelOutcome(Outcome):
    parallel: ParallelStats = field(default_factory=ParallelStats)


def run_parallel(
    instance: Instance,
    config: ParallelConfig | None = None,
    initial: Sequence[Permutation] | None = None,
) -> ParallelOutcome:
    """Simulate the parallel algorithm until no event is true or the round cap.

    ``log`` lists the applied resamplings in (round, sub-round, rank)
    order; replaying it sequentially from ``initial`` reproduces ``perms``.
    """
    config = config or ParallelConfig()
    seed, mode = config.seed, config.mode
    if initial is None:
        perms = initial_permutations(instance.sizes, seed)
    else:
        perms = [p.copy() for p in initial]
    start = [p.copy() for p in perms]
    oracle = instance.oracle
    stats = RunStats(swaps_per_perm=[0] * len(perms))
    pstats = ParallelStats()
    log: list[LogEntry] = []
    status = SUCCESS
    rnd = 0
    while True:
        live = oracle.all_true(perms)
        if not live:
            break
        if rnd >= config.max_rounds:
            status = ITERATION_LIMIT
            break
        rnd += 1
        sub = 0
        while live:
            sub += 1
            chosen = greedy_mis(live, mode, Rng.stream(seed, "mis", rnd, sub))
            # mates are drawn against nothing but n, so no permutation changes yet
            plans = []
            for e in chosen:
                erng = Rng.stream(seed, "mates", rnd, sub, e.id)
                plan = tuple(
                    (k, tuple(xs), tuple(draw_mates(perms[k].n, xs, erng)))
                    for k, xs in oracle.resample_targets(e, erng)
                )
                plans.append(plan)
            order = list(range(len(chosen)))
            Rng.stream(seed, "rank", rnd, sub).shuffle(order)
            rank = [0] * len(chosen)
            for pos, v in enumerate(order):
                rank[v] = pos
            g = ConflictGraph(len(chosen))
            source_of: dict[tuple[int, int], int] = {}
            for v, plan in enumerate(plans):
                for k, xs, _ in plan:
                    for x in xs:
                        source_of[(k, x)] = v
            for v, plan in enumerate(plans):
                for k, _, mates in plan:
                    for z in mates:
                        w = source_of.get((k, z))
                        if w is not None and w != v and rank[v] < rank[w]:
                            g.add_edge(v, w)
            keep, depth = peel_lfmis(g)
            pstats.peel_depths.append(depth)
            pstats.conflicts_dropped += len(chosen) - len(keep)
            # entry exchanges in rank order; apply_transpositions wants them reversed
            exchanges: dict[int, list[tuple[int, int]]] = {}
            kept = sorted(keep, key=lambda v: rank[v])
            for v in kept:
                e = chosen[v]
                for k, xs, mates in plans[v]:
                    exchanges.setdefault(k, []).extend(zip(xs, mates))
                    stats.swaps_per_perm[k] += 1
                stats.per_class[e.kind] += 1
                stats.per_event[e.id] += 1
                log.append(LogEntry(len(log) + 1, e, plans[v]))
            for k, ts in exchanges.items():
                apply_transpositions(perms[k], ts[::-1])
                pstats.transpositions += len(ts)
            blocked = _dependent_on([chosen[v] for v in kept], mode)
            live = [e for e in live if is_true(e, perms) and not blocked(e)]
        pstats.subrounds.append(sub)
    pstats.rounds = rnd
    stats.resamples = len(log)
    return ParallelOutcome(status, perms, log, stats, start, pstats)
