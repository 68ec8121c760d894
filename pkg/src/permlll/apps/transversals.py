"""Transversal solvers over a color matrix: Latin, s-bounded, and conjugate."""

from __future__ import annotations

import math
from collections.abc import Sequence

from ..criteria import check_szabo, conjugate_criterion, latin_alpha
from ..engine import EngineConfig, Instance
from ..events import BadEvent, Tracker, ViolationOracle
from ..parallel import ParallelConfig
from ..perm import Permutation
from .common import GroupedRows, SolveResult, execute, gate, iteration_limit
from .matrix import ColorMatrix


# --- Latin transversals --------------------------------------------------


class LatinOracle(ViolationOracle):
    """Events: two transversal cells in different rows share a color.

    The event for rows ``i < i2`` through cells ``(i, j)``, ``(i2, j2)`` has
    id ``((i·n + j)·n + i2)·n + j2``.
    """

    def __init__(self, matrix: ColorMatrix):
        self.matrix = matrix
        self.n = matrix.n

    def event(self, i: int, j: int, i2: int, j2: int) -> BadEvent:
        if i > i2:
            i, j, i2, j2 = i2, j2, i, j
        n = self.n
        return BadEvent(((i * n + j) * n + i2) * n + j2, ((0, i, j), (0, i2, j2)), "latin", False)

    def _events_of(self, rows: Sequence[int], f: Sequence[int]) -> list[BadEvent]:
        rows = sorted(rows)
        return [
            self.event(a, f[a], b, f[b])
            for ai, a in enumerate(rows)
            for b in rows[ai + 1 :]
        ]

    def all_true(self, perms):
        f = perms[0].forward
        groups: dict[int, list[int]] = {}
        for x, y in enumerate(f):
            groups.setdefault(self.matrix.rows[x][y], []).append(x)
        out = []
        for rows in groups.values():
            if len(rows) > 1:
                out.extend(self._events_of(rows, f))
        return sorted(out, key=lambda e: e.id)

    def tracker(self, perms):
        return _LatinTracker(self, perms)

    def explicit_events(self) -> list[BadEvent]:
        """Every possible event (for brute-force checks on small matrices)."""
        out = []
        for cells in self.matrix.index.values():
            for a, (i, j) in enumerate(cells):
                for i2, j2 in cells[a + 1 :]:
                    if i != i2 and j != j2:
                        out.append(self.event(i, j, i2, j2))
        return sorted(out, key=lambda e: e.id)


class _LatinTracker(Tracker):
    def __init__(self, oracle: LatinOracle, perms):
        super().__init__(oracle, perms)
        self.f = perms[0].forward
        self.groups = GroupedRows(oracle.matrix.rows, self.f, 2)

    def touched(self, k, positions):
        f = self.f
        update = self.groups.update
        for x in positions:
            update(x, f[x])

    def first_true(self):
        g = self.groups
        best = None
        for c in g.over:
            m = g.members[c]
            a = min(m)
            b = min(x for x in m if x != a)
            if best is None or (a, b) < best:
                best = (a, b)
        if best is None:
            return None
        a, b = best
        return self.oracle.event(a, self.f[a], b, self.f[b])

    def true_events(self):
        g = self.groups
        out = []
        for c in g.over:
            out.extend(self.oracle._events_of(g.members[c], self.f))
        return sorted(out, key=lambda e: e.id)


def latin_criterion(matrix: ColorMatrix) -> dict:
    n, delta = matrix.n, matrix.delta
    alpha = latin_alpha(n, delta)
    return {
        "name": "latin",
        "n": n,
        "delta": delta,
        "alpha": alpha,
        "satisfied": alpha is not None,
    }


def latin_transversal(
    matrix: ColorMatrix,
    config: EngineConfig | None = None,
    force: bool = False,
    parallel: ParallelConfig | None = None,
) -> SolveResult:
    """Permutation π with all colors ``A(i, π(i))`` distinct."""
    criterion = latin_criterion(matrix)
    gate(criterion, force)
    instance = Instance([matrix.n], LatinOracle(matrix), "latin")
    outcome = execute(instance, config, parallel)
    if not outcome.success:
        return iteration_limit(criterion, outcome)
    return SolveResult(outcome.status, outcome.perms[0], criterion, outcome)


# --- s-transversals ------------------------------------------------------


def hitting_size(s: int) -> int:
    """``⌈√s⌉``: how many occurrences one partial resampling moves."""
    return math.isqrt(s - 1) + 1 if s > 1 else 1


class STransversalOracle(ViolationOracle):
    """Event per color that occupies more than ``s`` transversal cells.

    Its triples are all of that color's current cells and its id is the
    color's rank among the matrix colors. Resampling moves a uniform random
    ``⌈√s⌉``-subset of those rows.
    """

    def __init__(self, matrix: ColorMatrix, s: int):
        if s < 1:
            raise ValueError("s must be >= 1")
        self.matrix = matrix
        self.s = s
        self.r = hitting_size(s)
        self.rank = {c: i for i, c in enumerate(matrix.colors())}

    def event(self, color: int, rows, f) -> BadEvent:
        return BadEvent(
            self.rank[color], [(0, x, f[x]) for x in rows], "s-transversal", False
        )

    def all_true(self, perms):
        f = perms[0].forward
        groups: dict[int, list[int]] = {}
        for x, y in enumerate(f):
            groups.setdefault(self.matrix.rows[x][y], []).append(x)
        out = [self.event(c, rows, f) for c, rows in groups.items() if len(rows) > self.s]
        return sorted(out, key=lambda e: e.id)

    def tracker(self, perms):
        return _STracker(self, perms)

    def resample_targets(self, event, rng):
        rows = [x for _, x, _ in event.triples]
        return ((0, tuple(rng.sample(rows, self.r))),)


class _STracker(Tracker):
    def __init__(self, oracle: STransversalOracle, perms):
        super().__init__(oracle, perms)
        self.f = perms[0].forward
        self.groups = GroupedRows(oracle.matrix.rows, self.f, oracle.s + 1)

    def touched(self, k, positions):
        f = self.f
        for x in positions:
            self.groups.update(x, f[x])

    def first_true(self):
        over = self.groups.over
        if not over:
            return None
        rank = self.oracle.rank
        c = min(over, key=rank.__getitem__)
        return self.oracle.event(c, self.groups.members[c], self.f)

    def true_events(self):
        g = self.groups
        out = [self.oracle.event(c, g.members[c], self.f) for c in g.over]
        return sorted(out, key=lambda e: e.id)


def s_transversal_criterion(matrix: ColorMatrix, s: int) -> dict:
    n, delta = matrix.n, matrix.delta
    r = min(hitting_size(s), n)
    ok = check_szabo(n, s, r, min(delta, n * n)) if r <= s else True
    return {"name": "s-transversal", "n": n, "s": s, "r": r, "delta": delta, "satisfied": ok}


def s_transversal(
    matrix: ColorMatrix,
    s: int,
    config: EngineConfig | None = None,
    force: bool = False,
    parallel: ParallelConfig | None = None,
) -> SolveResult:
    """Permutation π in which no color occupies more than ``s`` cells ``(i, π(i))``."""
    oracle = STransversalOracle(matrix, s)
    criterion = s_transversal_criterion(matrix, s)
    gate(criterion, force)
    outcome = execute(Instance([matrix.n], oracle, "s-transversal"), config, parallel)
    if not outcome.success:
        return iteration_limit(criterion, outcome)
    return SolveResult(outcome.status, outcome.perms[0], criterion, outcome)


# --- conjugate ("rainbow") transversals ------------------------------------


def check_tau(tau: Permutation) -> None:
    lengths = tau.cycle_type()
    if lengths and min(lengths) < 3:
        raise ValueError(f"τ must have no fixed points or 2-cycles; cycle type {lengths}")


def cycles_of_length(n: int, length: int) -> Permutation:
    """Product of disjoint ``length``-cycles on ``range(n)``; the last absorbs any remainder."""
    if length < 3 or n < length:
        raise ValueError("need 3 <= length <= n")
    forward = list(range(n))
    starts = list(range(0, n - n % length, length))
    for a, s in enumerate(starts):
        end = n if a == len(starts) - 1 else s + length
        for x in range(s, end):
            forward[x] = x + 1 if x + 1 < end else s
    return Permutation(forward)


class ConjugateOracle(ViolationOracle):
    """Events over σ when the transversal is π = σ⁻¹τσ.

    A repeated color on rows ``x ≠ x2`` is a three-triple event when one
    row is the π-image of the other (the cells chain ``(x,y),(y,z)``) and a
    four-triple event otherwise.
    """

    def __init__(self, matrix: ColorMatrix, tau: Permutation):
        check_tau(tau)
        if tau.n != matrix.n:
            raise ValueError("τ and the matrix differ in size")
        self.matrix = matrix
        self.tau = tau
        self.n = matrix.n

    def pi_forward(self, sigma: Permutation) -> list[int]:
        t = self.tau.forward
        s, sinv = sigma.forward, sigma.inverse
        return [sinv[t[s[x]]] for x in range(len(s))]

    def event_for(self, x: int, x2: int, sigma: Permutation, pi: Sequence[int]) -> BadEvent:
        n = self.n
        s, t = sigma.forward, self.tau.forward
        if pi[x2] == x:
            x, x2 = x2, x
        if pi[x] == x2:
            y, z = x2, pi[x2]
            i = s[x]
            code = ((x * n + y) * n + z) * n + i
            return BadEvent(2 * code + 1, ((0, x, i), (0, y, t[i]), (0, z, t[t[i]])), "B", False)
        if x > x2:
            x, x2 = x2, x
        y, y2 = pi[x], pi[x2]
        i, i2 = s[x], s[x2]
        code = ((((x * n + y) * n + i) * n + x2) * n + y2) * n + i2
        return BadEvent(
            2 * code, ((0, x, i), (0, y, t[i]), (0, x2, i2), (0, y2, t[i2])), "A", False
        )

    def _events_of(self, rows, sigma, pi) -> list[BadEvent]:
        rows = sorted(rows)
        return [
            self.event_for(a, b, sigma, pi) for ai, a in enumerate(rows) for b in rows[ai + 1 :]
        ]

    def all_true(self, perms):
        sigma = perms[0]
        pi = self.pi_forward(sigma)
        groups: dict[int, list[int]] = {}
        for x, y in enumerate(pi):
            groups.setdefault(self.matrix.rows[x][y], []).append(x)
        out = []
        for rows in groups.values():
            if len(rows) > 1:
                out.extend(self._events_of(rows, sigma, pi))
        return sorted(out, key=lambda e: e.id)

    def tracker(self, perms):
        return _ConjugateTracker(self, perms)


class _ConjugateTracker(Tracker):
    def __init__(self, oracle: ConjugateOracle, perms):
        super().__init__(oracle, perms)
        self.sigma = perms[0]
        self.tau_inv = oracle.tau.inverse
        self.pi = oracle.pi_forward(self.sigma)
        self.groups = GroupedRows(oracle.matrix.rows, self.pi, 2)

    def touched(self, k, positions):
        s, sinv = self.sigma.forward, self.sigma.inverse
        t, tinv = self.oracle.tau.forward, self.tau_inv
        pi = self.pi
        # π(x) moves when σ(x) moves or when σ⁻¹ moves at τ(σ(x))
        affected = set(positions)
        affected.update(sinv[tinv[s[p]]] for p in positions)
        for x in affected:
            pi[x] = sinv[t[s[x]]]
        for x in affected:
            self.groups.update(x, pi[x])

    def true_events(self):
        g = self.groups
        out = []
        for c in g.over:
            out.extend(self.oracle._events_of(g.members[c], self.sigma, self.pi))
        return sorted(out, key=lambda e: e.id)

    def first_true(self):
        live = self.true_events()
        return live[0] if live else None


def conjugate_criterion_report(matrix: ColorMatrix) -> dict:
    n, delta = matrix.n, matrix.delta
    poly = conjugate_criterion(n, delta)
    return {
        "name": "conjugate",
        "n": n,
        "delta": delta,
        # with every color once there is nothing to avoid
        "satisfied": bool(poly["ratio_ok"]) or delta <= 1,
        "weights_inequalities_hold": bool(poly["satisfied"]),
    }


def conjugate_transversal(
    matrix: ColorMatrix,
    tau: Permutation,
    config: EngineConfig | None = None,
    force: bool = False,
    parallel: ParallelConfig | None = None,
) -> SolveResult:
    """Latin transversal π = σ⁻¹τσ with the cycle type of ``τ``.

    ``result`` is π; ``extra["sigma"]`` holds σ.
    """
    oracle = ConjugateOracle(matrix, tau)
    criterion = conjugate_criterion_report(matrix)
    gate(criterion, force)
    outcome = execute(Instance([matrix.n], oracle, "conjugate"), config, parallel)
    if not outcome.success:
        return iteration_limit(criterion, outcome)
    sigma = outcome.perms[0]
    pi = Permutation(oracle.pi_forward(sigma))
    return SolveResult(outcome.status, pi, criterion, outcome, {"sigma": sigma})
