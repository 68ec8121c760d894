"""Block graphs: strong colorings and independent transversals."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from ..criteria import strong_coloring_alpha
from ..engine import SUCCESS, EngineConfig, Instance
from ..events import BadEvent, FormatError, Tracker, ViolationOracle, _content_lines
from ..parallel import ParallelConfig
from ..rng import Rng
from .common import SolveResult, execute, gate, iteration_limit


class BlockGraph:
    """Graph on ``range(n)`` whose vertices are split into k blocks of size b."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], blocks: Sequence[Sequence[int]]):
        blocks = [list(b) for b in blocks]
        if not blocks:
            raise ValueError("need at least one block")
        b = len(blocks[0])
        if any(len(bl) != b for bl in blocks):
            raise ValueError("blocks must all have the same size")
        seen = sorted(v for bl in blocks for v in bl)
        if seen != list(range(n)):
            raise ValueError("blocks must partition the vertices")
        self.n = n
        self.b = b
        self.k = len(blocks)
        self.blocks = blocks
        self.block_of = [0] * n
        self.pos = [0] * n
        for k, bl in enumerate(blocks):
            for p, v in enumerate(bl):
                self.block_of[v] = k
                self.pos[v] = p
        self.adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
            self.adj[u].add(v)
            self.adj[v].add(u)
        self.edges = sorted({(min(u, v), max(u, v)) for u in range(n) for v in self.adj[u]})

    @property
    def delta(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    @classmethod
    def parse(cls, text: str) -> "BlockGraph":
        """``n m k b`` header, m lines ``u v``, then k lines of b vertices (1-based)."""
        lines = list(_content_lines(text))
        if not lines:
            raise FormatError("empty block graph", 1)
        lineno, header = lines[0]
        try:
            n, m, k, b = (int(v) for v in header.split())
        except ValueError:
            raise FormatError("expected header 'n m k b'", lineno) from None
        if len(lines) != 1 + m + k:
            raise FormatError(f"expected {m} edge lines and {k} block lines", lines[-1][0])
        if k * b != n:
            raise FormatError(f"k*b = {k * b} does not equal n = {n}", lineno)
        edges, blocks = [], []
        for lineno, line in lines[1 : 1 + m]:
            try:
                u, v = (int(t) - 1 for t in line.split())
            except ValueError:
                raise FormatError("expected edge 'u v'", lineno) from None
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise FormatError(f"edge ({u + 1}, {v + 1}) out of range or a loop", lineno)
            edges.append((u, v))
        for lineno, line in lines[1 + m :]:
            try:
                bl = [int(t) - 1 for t in line.split()]
            except ValueError:
                raise FormatError("expected block vertex ids", lineno) from None
            if len(bl) != b:
                raise FormatError(f"block has {len(bl)} vertices, expected {b}", lineno)
            blocks.append(bl)
        try:
            return cls(n, edges, blocks)
        except ValueError as exc:
            raise FormatError(str(exc), lines[-1][0]) from None

    def format(self) -> str:
        out = [f"{self.n} {len(self.edges)} {self.k} {self.b}"]
        out += [f"{u + 1} {v + 1}" for u, v in self.edges]
        out += [" ".join(str(v + 1) for v in bl) for bl in self.blocks]
        return "\n".join(out) + "\n"


def random_block_graph(k: int, b: int, delta: int, seed: int = 0, fill: float = 1.0) -> BlockGraph:
    """Random graph of max degree ≤ ``delta`` with blocks of consecutive ids.

    Edges are added between random vertex pairs while both ends have spare
    degree; ``fill`` scales how many attempts are made.
    """
    n = k * b
    rng = Rng.stream(seed, "block-graph", k, b, delta)
    adj: list[set[int]] = [set() for _ in range(n)]
    for _ in range(int(fill * 20 * n * max(delta, 1))):
        u, v = rng.below(n), rng.below(n)
        if u != v and v not in adj[u] and len(adj[u]) < delta and len(adj[v]) < delta:
            adj[u].add(v)
            adj[v].add(u)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    blocks = [list(range(i * b, (i + 1) * b)) for i in range(k)]
    return BlockGraph(n, edges, blocks)


def perfect_matching_graph(b: int) -> BlockGraph:
    """Two blocks of size b with vertex i of the first matched to vertex i of the second."""
    return BlockGraph(2 * b, [(i, b + i) for i in range(b)], [range(b), range(b, 2 * b)])


# --- strong coloring with one permutation per block --------------------------


class StrongColorOracle(ViolationOracle):
    """Event ``(u, v, c)``: both ends of a cross-block edge get color c.

    Edge ``e`` (index into ``graph.edges``) and color ``c`` give id
    ``e·b + c``. Same-block edges need no events: a bijection never
    repeats a color inside a block.
    """

    def __init__(self, graph: BlockGraph):
        self.graph = graph
        self.cross = [
            (idx, u, v)
            for idx, (u, v) in enumerate(graph.edges)
            if graph.block_of[u] != graph.block_of[v]
        ]
        self.incident: list[list[tuple[int, int, int]]] = [[] for _ in range(graph.n)]
        for e in self.cross:
            self.incident[e[1]].append(e)
            self.incident[e[2]].append(e)

    def event(self, idx: int, u: int, v: int, c: int) -> BadEvent:
        g = self.graph
        return BadEvent(
            idx * g.b + c,
            ((g.block_of[u], g.pos[u], c), (g.block_of[v], g.pos[v], c)),
            "edge",
            False,
        )

    def color(self, perms, v: int) -> int:
        g = self.graph
        return perms[g.block_of[v]].forward[g.pos[v]]

    def all_true(self, perms):
        out = []
        for idx, u, v in self.cross:
            c = self.color(perms, u)
            if c == self.color(perms, v):
                out.append(self.event(idx, u, v, c))
        return out

    def explicit_events(self) -> list[BadEvent]:
        return [
            self.event(idx, u, v, c) for idx, u, v in self.cross for c in range(self.graph.b)
        ]

    def tracker(self, perms):
        return _StrongTracker(self, perms)


class _StrongTracker(Tracker):
    def __init__(self, oracle: StrongColorOracle, perms):
        super().__init__(oracle, perms)
        self.bad = {e[0]: e for e in oracle.cross if oracle.color(perms, e[1]) == oracle.color(perms, e[2])}
        self.blocks = oracle.graph.blocks

    def touched(self, k, positions):
        oracle, perms, bad = self.oracle, self.perms, self.bad
        block = self.blocks[k]
        for p in positions:
            for e in oracle.incident[block[p]]:
                if oracle.color(perms, e[1]) == oracle.color(perms, e[2]):
                    bad[e[0]] = e
                else:
                    bad.pop(e[0], None)

    def _event(self, e):
        idx, u, v = e
        return self.oracle.event(idx, u, v, self.oracle.color(self.perms, u))

    def first_true(self):
        if not self.bad:
            return None
        return self._event(self.bad[min(self.bad)])

    def true_events(self):
        return [self._event(self.bad[i]) for i in sorted(self.bad)]


def strong_coloring_criterion(graph: BlockGraph) -> dict:
    alpha = strong_coloring_alpha(graph.b, graph.delta) if graph.delta else 0.0
    return {
        "name": "strong-coloring",
        "b": graph.b,
        "delta": graph.delta,
        "alpha": alpha,
        "satisfied": alpha is not None,
    }


def strong_color_permutation(
    graph: BlockGraph,
    config: EngineConfig | None = None,
    force: bool = False,
    parallel: ParallelConfig | None = None,
) -> SolveResult:
    """Strong coloring as a list ``color[v]`` in ``range(b)``.

    Block k's i-th listed vertex gets color ``π_k(i)``.
    """
    criterion = strong_coloring_criterion(graph)
    gate(criterion, force)
    oracle = StrongColorOracle(graph)
    outcome = execute(Instance([graph.b] * graph.k, oracle, "strong-color"), config, parallel)
    if not outcome.success:
        return iteration_limit(criterion, outcome)
    colors = [oracle.color(outcome.perms, v) for v in range(graph.n)]
    return SolveResult(outcome.status, colors, criterion, outcome)


# --- independent transversals (variable-model resampling) ---------------------


def _one_transversal(
    graph: BlockGraph,
    allowed: Sequence[Sequence[int]],
    rng: Rng,
    max_resamplings: int,
) -> tuple[list[int] | None, int]:
    chosen = [rng.choice(a) for a in allowed]
    block_of = graph.block_of
    picked = set(chosen)
    bad = {(u, v) for u in chosen for v in graph.adj[u] if v in picked and u < v}
    steps = 0
    while bad:
        if steps >= max_resamplings:
            return None, steps
        steps += 1
        u, v = min(bad)
        for blk in (block_of[u], block_of[v]):
            old = chosen[blk]
            picked.discard(old)
            for w in graph.adj[old]:
                bad.discard((min(old, w), max(old, w)))
            new = rng.choice(allowed[blk])
            chosen[blk] = new
            picked.add(new)
            for w in graph.adj[new]:
                if w in picked:
                    bad.add((min(new, w), max(new, w)))
    return chosen, steps


def independent_transversal(
    graph: BlockGraph,
    require: int | None = None,
    config: EngineConfig | None = None,
    allowed: Sequence[Sequence[int]] | None = None,
    max_attempts: int = 10_000,
    force: bool = False,
) -> SolveResult:
    """One vertex per block, pairwise non-adjacent.

    Each block picks uniformly from ``allowed`` (default: the whole block);
    while an edge has both ends picked, both blocks pick again. With
    ``require``, whole searches are repeated until that vertex is picked.
    """
    config = config or EngineConfig()
    if allowed is None:
        allowed = graph.blocks
    allowed = [sorted(a) for a in allowed]
    if any(not a for a in allowed):
        raise ValueError("every block needs a non-empty allowed set")
    if require is not None and require not in allowed[graph.block_of[require]]:
        raise ValueError(f"required vertex {require} is not allowed in its block")
    smallest = min(len(a) for a in allowed)
    criterion = {
        "name": "independent-transversal",
        "b": smallest,
        "delta": graph.delta,
        "satisfied": smallest >= 4 * graph.delta,
    }
    gate(criterion, force)
    total = 0
    for attempt in range(1, max_attempts + 1):
        rng = Rng.stream(config.seed, "transversal", attempt)
        chosen, steps = _one_transversal(graph, allowed, rng, config.max_resamplings)
        total += steps
        if chosen is None:
            return iteration_limit(criterion, resamples=total, attempts=attempt)
        if require is None or chosen[graph.block_of[require]] == require:
            return SolveResult(SUCCESS, chosen, criterion, None, {"resamples": total, "attempts": attempt})
    return iteration_limit(criterion, resamples=total, attempts=max_attempts)


# --- strong coloring by growing a partial coloring ------------------------------


def _proper_partial(graph: BlockGraph, color: Sequence[int], vertices: Iterable[int]) -> bool:
    for v in vertices:
        c = color[v]
        if c < 0:
            continue
        for w in graph.adj[v]:
            if color[w] == c:
                return False
    return True


def strong_color_iterative(
    graph: BlockGraph,
    config: EngineConfig | None = None,
    force: bool = False,
    max_attempts: int = 10_000,
    max_clash_retries: int = 100,
) -> SolveResult:
    """Strong coloring built one color class adjustment at a time.

    Each phase takes an uncolored vertex w and a color c its block lacks,
    finds an independent transversal through w over vertices whose old
    color can pass to their block's current c-holder without conflict, gives
    the transversal color c and hands the old colors to the displaced
    holders. ``extra["colored_counts"]`` records progress after each phase.
    """
    config = config or EngineConfig()
    b = graph.b
    criterion = {
        "name": "strong-coloring-iterative",
        "b": b,
        "delta": graph.delta,
        "satisfied": b >= 5 * graph.delta,
    }
    gate(criterion, force)
    color = [-1] * graph.n
    holder = [[-1] * b for _ in range(graph.k)]
    counts = [0]
    phase = 0
    while True:
        w = next((v for v in range(graph.n) if color[v] < 0), None)
        if w is None:
            break
        phase += 1
        wb = graph.block_of[w]
        c = next(c for c in range(b) if holder[wb][c] < 0)
        allowed = []
        for blk, vertices in enumerate(graph.blocks):
            u = holder[blk][c]
            if u < 0:
                allowed.append(list(vertices))
                continue
            near = {color[x] for x in graph.adj[u] if color[x] >= 0}
            allowed.append([v for v in vertices if v == u or color[v] not in near])
        if w not in allowed[wb]:
            allowed[wb].append(w)
        done = False
        for attempt in range(1, max_clash_retries + 1):
            sub = EngineConfig(
                seed=Rng.stream(config.seed, "phase", phase, attempt).next64(),
                max_resamplings=config.max_resamplings,
            )
            found = independent_transversal(graph, w, sub, allowed, max_attempts, force=True)
            if not found.success:
                continue
            new = color.copy()
            for blk, v in enumerate(found.result):
                u = holder[blk][c]
                old = color[v]
                new[v] = c
                if u >= 0 and u != v:
                    new[u] = old
            touched = [v for v in range(graph.n) if new[v] != color[v]]
            # two displaced holders could still clash; retry in that case
            if _proper_partial(graph, new, touched):
                color = new
                done = True
                break
        if not done:
            return iteration_limit(criterion, colored_counts=counts, phases=phase)
        holder = [[-1] * b for _ in range(graph.k)]
        for v, cv in enumerate(color):
            if cv >= 0:
                holder[graph.block_of[v]][cv] = v
        colored = sum(1 for cv in color if cv >= 0)
        if colored <= counts[-1]:
            raise AssertionError("a phase failed to color a new vertex")
        counts.append(colored)
    return SolveResult(SUCCESS, color, criterion, None, {"colored_counts": counts, "phases": phase})
