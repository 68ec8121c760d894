"""Witness trees and their per-permutation subdag projections.

Diagnostics only: built from a finished execution log, never in the hot loop.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .events import STANDARD, BadEvent, EventIndex, depends, prob_omega_float


@dataclass
class WitnessNode:
    event: BadEvent
    time: int
    depth: int
    parent: int | None
    children: list[int] = field(default_factory=list)


class WitnessTree:
    """Rooted tree of event occurrences; node 0 is the root."""

    def __init__(self, nodes: list[WitnessNode], mode: str = STANDARD):
        self.nodes = nodes
        self.mode = mode

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> WitnessNode:
        return self.nodes[0]

    def key(self, i: int = 0):
        """Canonical shape: ``(event id, sorted child keys)``; ignores times."""
        node = self.nodes[i]
        return (node.event.id, tuple(sorted(self.key(c) for c in node.children)))

    def height(self) -> int:
        return max(n.depth for n in self.nodes)

    def events(self) -> list[BadEvent]:
        return [n.event for n in self.nodes]

    def check(self) -> None:
        """Assert the structural properties of a witness tree."""
        for i, node in enumerate(self.nodes):
            if node.parent is not None:
                parent = self.nodes[node.parent]
                assert node.depth == parent.depth + 1
                assert node.time < parent.time, "times must decrease away from the root"
                assert depends(node.event, parent.event, self.mode)
        by_depth: dict[int, list[WitnessNode]] = {}
        for node in self.nodes:
            by_depth.setdefault(node.depth, []).append(node)
        for level in by_depth.values():
            for a in range(len(level)):
                for b in range(a + 1, len(level)):
                    assert not depends(level[a].event, level[b].event, self.mode), (
                        "same-depth labels must be independent"
                    )


def _event_of(entry) -> BadEvent:
    return entry if isinstance(entry, BadEvent) else entry.event


def build_witness_tree(log: Sequence, t: int, mode: str = STANDARD) -> WitnessTree:
    """Witness tree for the resampling at 1-based time ``t``.

    ``log`` holds LogEntry objects or bare events. Scanning backwards, each
    earlier event hangs under the deepest node it depends on (earliest-added
    on ties) and is dropped if it depends on none.
    """
    if not 1 <= t <= len(log):
        raise ValueError(f"time {t} outside 1..{len(log)}")
    nodes = [WitnessNode(_event_of(log[t - 1]), t, 0, None)]
    for s in range(t - 1, 0, -1):
        ev = _event_of(log[s - 1])
        best = -1
        best_depth = -1
        for i, node in enumerate(nodes):
            if node.depth > best_depth and depends(node.event, ev, mode):
                best, best_depth = i, node.depth
        if best >= 0:
            nodes[best].children.append(len(nodes))
            nodes.append(WitnessNode(ev, s, best_depth + 1, best))
    return WitnessTree(nodes, mode)


@dataclass
class SubdagNode:
    x: int
    y: int
    event_id: int
    tree_node: int


@dataclass
class WitnessSubdag:
    """Projection of a witness tree onto one permutation.

    Edges run from a deeper occurrence to the shallower one it attaches to.
    """

    k: int
    nodes: list[SubdagNode]
    edges: set[tuple[int, int]]

    def successors(self, i: int) -> list[int]:
        return sorted(b for a, b in self.edges if a == i)

    def _reach(self) -> list[set[int]]:
        out = {i: [] for i in range(len(self.nodes))}
        for a, b in self.edges:
            out[a].append(b)
        reach = []
        for i in range(len(self.nodes)):
            seen, stack = set(), [i]
            while stack:
                for j in out[stack.pop()]:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
            reach.append(seen)
        return reach

    def is_acyclic(self) -> bool:
        return all(i not in r for i, r in enumerate(self._reach()))

    def comparable(self, i: int, j: int) -> bool:
        reach = self._reach()
        return j in reach[i] or i in reach[j]

    def max_degrees(self) -> tuple[int, int]:
        indeg = [0] * len(self.nodes)
        outdeg = [0] * len(self.nodes)
        for a, b in self.edges:
            outdeg[a] += 1
            indeg[b] += 1
        return max(indeg, default=0), max(outdeg, default=0)

    def check(self) -> None:
        assert self.is_acyclic()
        reach = self._reach()
        for i, a in enumerate(self.nodes):
            for j in range(i + 1, len(self.nodes)):
                b = self.nodes[j]
                if a.x == b.x or a.y == b.y:
                    # occurrences inside a single event never share a slice
                    assert j in reach[i] or i in reach[j], (a, b)
        indeg, outdeg = self.max_degrees()
        assert indeg <= 2 and outdeg <= 2

    def labels(self, one_based: bool = True) -> list[tuple[int, int]]:
        off = 1 if one_based else 0
        return [(n.x + off, n.y + off) for n in self.nodes]


def project_witness_subdag(tree: WitnessTree, k: int) -> WitnessSubdag:
    """Project ``tree`` onto permutation ``k``.

    A node for ``(x, y)`` points to the projection of the closest shallower
    tree node holding ``(k, x, ·)`` and of the one holding ``(k, ·, y)``.
    Tree nodes are ordered by (depth, event id, insertion); the id term only
    matters in lopsided mode, where copies of one triple may share a depth.
    """
    order = sorted(
        range(len(tree.nodes)),
        key=lambda i: (tree.nodes[i].depth, tree.nodes[i].event.id, i),
    )
    rank = {i: r for r, i in enumerate(order)}
    nodes: list[SubdagNode] = []
    owned: dict[int, list[int]] = {}
    for i in order:
        for kk, x, y in tree.nodes[i].event.triples:
            if kk == k:
                owned.setdefault(i, []).append(len(nodes))
                nodes.append(SubdagNode(x, y, tree.nodes[i].event.id, i))
    edges: set[tuple[int, int]] = set()
    for a, node in enumerate(nodes):
        r = rank[node.tree_node]
        target_x = target_y = None
        # walk shallower tree nodes from closest to farthest
        for j in reversed(order[:r]):
            for b in owned.get(j, ()):
                if target_x is None and nodes[b].x == node.x:
                    target_x = b
                if target_y is None and nodes[b].y == node.y:
                    target_y = b
            if target_x is not None and target_y is not None:
                break
        for b in (target_x, target_y):
            if b is not None:
                edges.add((a, b))
    return WitnessSubdag(k, nodes, edges)


def mt_bound(
    conj,
    mu: Mapping[int, float],
    events: Iterable[BadEvent] | EventIndex,
    sizes: Sequence[int],
    mode: str = STANDARD,
) -> float:
    """Upper bound ``P(E)·∏_{B'~E}(1+μ(B'))`` on a conjunction holding at the end."""
    if not isinstance(conj, BadEvent):
        conj = BadEvent(-1, conj)
    index = events if isinstance(events, EventIndex) else EventIndex(events)
    bound = prob_omega_float(conj, sizes)
    for nb in index.neighborhood(conj, mode):
        bound *= 1.0 + mu[nb.id]
    return bound if math.isfinite(bound) else math.inf
