"""Atomic bad-events over a family of permutations, and how to detect them.

A bad-event is a set of triples ``(k, x, y)`` meaning "permutation k maps x
to y"; it is true when every triple holds. Two events depend on each other
when they touch the same domain slice ``(k, x, ·)`` or range slice
``(k, ·, y)``; the lopsided variant exempts identical shared triples.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from collections import defaultdict
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import NamedTuple

from .perm import Permutation
from .rng import Rng

STANDARD = "standard"
LOPSIDED = "lopsided"
MODES = (STANDARD, LOPSIDED)


class Triple(NamedTuple):
    k: int
    x: int
    y: int


class BadEvent:
    """Immutable conjunction of triples with an integer id.

    Dependency and equality go by ``id``: two events with the same triples
    but different ids are distinct events.
    """

    __slots__ = ("id", "triples", "kind", "_groups")

    def __init__(self, id: int, triples: Iterable, kind: str = "event", validate: bool = True):
        ts = tuple(sorted(Triple(*t) for t in triples))
        if validate:
            if not ts:
                raise ValueError(f"event {id} has no triples")
            seen_x: dict[tuple[int, int], int] = {}
            seen_y: dict[tuple[int, int], int] = {}
            for k, x, y in ts:
                if seen_x.get((k, x), y) != y or seen_y.get((k, y), x) != x:
                    raise ValueError(
                        f"event {id} is impossible: conflicting triples on permutation {k}"
                    )
                seen_x[(k, x)] = y
                seen_y[(k, y)] = x
            ts = tuple(dict.fromkeys(ts))
        self.id = id
        self.triples = ts
        self.kind = kind
        groups: dict[int, list[int]] = {}
        for k, x, _ in ts:
            groups.setdefault(k, []).append(x)
        self._groups = tuple((k, tuple(xs)) for k, xs in groups.items())

    def __repr__(self) -> str:
        return f"BadEvent({self.id}, {list(map(tuple, self.triples))})"

    def __eq__(self, other) -> bool:
        if isinstance(other, BadEvent):
            return self.id == other.id and self.triples == other.triples
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.id)

    def __len__(self) -> int:
        return len(self.triples)

    def domain_points(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """``((k, xs), ...)``: the domain points of each involved permutation."""
        return self._groups

    def perms_involved(self) -> list[int]:
        return [k for k, _ in self._groups]

    def counts(self) -> dict[int, int]:
        return {k: len(xs) for k, xs in self._groups}


def falling_factorial(n: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= n - i
    return out


def prob_omega(event: BadEvent, sizes: Sequence[int]) -> Fraction:
    """Probability of ``event`` under independent uniform permutations."""
    p = Fraction(1)
    for k, xs in event.domain_points():
        if k >= len(sizes):
            raise ValueError(f"event {event.id} uses permutation {k}; only {len(sizes)} given")
        n = sizes[k]
        r = len(xs)
        if r > n or any(t.x >= n or t.y >= n for t in event.triples if t.k == k):
            raise ValueError(f"event {event.id} does not fit permutation {k} of size {n}")
        p /= falling_factorial(n, r)
    return p


def prob_omega_float(event: BadEvent, sizes: Sequence[int]) -> float:
    logp = 0.0
    for k, xs in event.domain_points():
        n = sizes[k]
        logp -= math.lgamma(n + 1) - math.lgamma(n - len(xs) + 1)
    return math.exp(logp)


def depends(a: BadEvent, b: BadEvent, mode: str = STANDARD) -> bool:
    """The relation ``a ~ b``; symmetric in both modes."""
    if mode == STANDARD:
        for k, x, y in a.triples:
            for k2, x2, y2 in b.triples:
                if k == k2 and (x == x2 or y == y2):
                    return True
        return False
    if mode == LOPSIDED:
        if a.id == b.id:
            return True
        for k, x, y in a.triples:
            for k2, x2, y2 in b.triples:
                if k == k2 and (x == x2) != (y == y2):
                    return True
        return False
    raise ValueError(f"unknown dependency mode {mode!r}")


def is_true(event: BadEvent, perms: Sequence[Permutation]) -> bool:
    for k, x, y in event.triples:
        if perms[k].forward[x] != y:
            return False
    return True


class EventIndex:
    """Slice index over a static event list: ``(k, x)`` and ``(k, y)`` → events."""

    def __init__(self, events: Iterable[BadEvent]):
        self.events = list(events)
        self.by_x: dict[tuple[int, int], list[BadEvent]] = defaultdict(list)
        self.by_y: dict[tuple[int, int], list[BadEvent]] = defaultdict(list)
        self.by_id: dict[int, BadEvent] = {}
        for e in self.events:
            if e.id in self.by_id:
                raise ValueError(f"duplicate event id {e.id}")
            self.by_id[e.id] = e
            for k, x, y in e.triples:
                self.by_x[(k, x)].append(e)
                self.by_y[(k, y)].append(e)

    def neighborhood(self, event: BadEvent, mode: str = STANDARD) -> list[BadEvent]:
        """All indexed events ``B'`` with ``event ~ B'``, sorted by id."""
        found: dict[int, BadEvent] = {}
        for k, x, y in event.triples:
            for e in self.by_x.get((k, x), ()):
                found[e.id] = e
            for e in self.by_y.get((k, y), ()):
                found[e.id] = e
        if mode == LOPSIDED:
            found = {i: e for i, e in found.items() if depends(event, e, LOPSIDED)}
            if event.id in self.by_id:
                found[event.id] = self.by_id[event.id]
        elif mode != STANDARD:
            raise ValueError(f"unknown dependency mode {mode!r}")
        return [found[i] for i in sorted(found)]


def neighborhood(event: BadEvent, events, mode: str = STANDARD) -> list[BadEvent]:
    index = events if isinstance(events, EventIndex) else EventIndex(events)
    return index.neighborhood(event, mode)


# --- violation detection -------------------------------------------------

FIRST = "first"
RANDOM = "random"
PRIORITY = "priority"
SELECTIONS = (FIRST, RANDOM, PRIORITY)


class Tracker:
    """Per-run view of which events are currently true.

    The engine calls :meth:`touched` after each swap so that incremental
    trackers can update; this base version rescans through the oracle.
    """

    def __init__(self, oracle: "ViolationOracle", perms: Sequence[Permutation]):
        self.oracle = oracle
        self.perms = perms

    def touched(self, k: int, positions: Iterable[int]) -> None:
        pass

    def true_events(self) -> list[BadEvent]:
        return self.oracle.all_true(self.perms)

    def first_true(self) -> BadEvent | None:
        return self.oracle.find_true(self.perms)

    def pick(self, selection: str, rng: Rng, priority=None) -> BadEvent | None:
        if selection == FIRST:
            return self.first_true()
        live = self.true_events()
        if not live:
            return None
        if selection == RANDOM:
            return live[rng.below(len(live))]
        if selection == PRIORITY:
            return min(live, key=lambda e: (priority(e), e.id))
        raise ValueError(f"unknown selection rule {selection!r}")


class ViolationOracle(ABC):
    """Finds true bad-events; concrete oracles may keep ``𝓑`` implicit."""

    #: explicit event list, or None when events are generated on demand
    events: list[BadEvent] | None = None

    @abstractmethod
    def all_true(self, perms: Sequence[Permutation]) -> list[BadEvent]:
        """Every true event exactly once, sorted by id."""

    def find_true(self, perms: Sequence[Permutation]) -> BadEvent | None:
        live = self.all_true(perms)
        return live[0] if live else None

    def tracker(self, perms: Sequence[Permutation]) -> Tracker:
        return Tracker(self, perms)

    def resample_targets(self, event: BadEvent, rng: Rng):
        """``((k, xs), ...)`` to pass to Swap when ``event`` is resampled."""
        return event.domain_points()


class ExplicitList(ViolationOracle):
    """Oracle over an explicit event list, scanning only the touched slices."""

    def __init__(self, events: Iterable[BadEvent], sizes: Sequence[int] | None = None):
        self.index = EventIndex(events)
        self.events = self.index.events
        if sizes is not None:
            for e in self.events:
                prob_omega(e, sizes)  # raises on size mismatch

    def all_true(self, perms):
        return [e for e in self.events if is_true(e, perms)]

    def find_true(self, perms):
        best = None
        for e in self.events:
            if (best is None or e.id < best.id) and is_true(e, perms):
                best = e
        return best

    def tracker(self, perms):
        return _ExplicitTracker(self, perms)


class _ExplicitTracker(Tracker):
    def __init__(self, oracle: ExplicitList, perms):
        super().__init__(oracle, perms)
        self.by_x = oracle.index.by_x
        self.live: dict[int, BadEvent] = {e.id: e for e in oracle.all_true(perms)}

    def touched(self, k, positions):
        live = self.live
        perms = self.perms
        for x in positions:
            for e in self.by_x.get((k, x), ()):
                if is_true(e, perms):
                    live[e.id] = e
                else:
                    live.pop(e.id, None)

    def true_events(self):
        live = self.live
        return [live[i] for i in sorted(live)]

    def first_true(self):
        live = self.live
        return live[min(live)] if live else None


# --- event-list file format ------------------------------------------------


class FormatError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _content_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def parse_event_list(text: str) -> tuple[list[int], list[BadEvent]]:
    """Parse ``perms K n_1..n_K`` then ``event t k x y ...`` lines (1-based)."""
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty event list", 1)
    lineno, header = lines[0]
    parts = header.split()
    try:
        if parts[0] != "perms":
            raise FormatError("expected header 'perms K n_1 ... n_K'", lineno)
        count = int(parts[1])
        sizes = [int(v) for v in parts[2:]]
    except (IndexError, ValueError):
        raise FormatError("expected header 'perms K n_1 ... n_K'", lineno) from None
    if len(sizes) != count or any(n < 1 for n in sizes):
        raise FormatError(f"header declares {count} permutations but lists sizes {sizes}", lineno)
    events = []
    for lineno, line in lines[1:]:
        parts = line.split()
        try:
            if parts[0] != "event":
                raise ValueError
            t = int(parts[1])
            nums = [int(v) for v in parts[2:]]
        except (IndexError, ValueError):
            raise FormatError("expected 'event t k_1 x_1 y_1 ...'", lineno) from None
        if t < 1 or len(nums) != 3 * t:
            raise FormatError(f"event declares {t} triples but has {len(nums)} numbers", lineno)
        triples = []
        for j in range(t):
            k, x, y = nums[3 * j : 3 * j + 3]
            if not 1 <= k <= count:
                raise FormatError(f"permutation index {k} out of range 1..{count}", lineno)
            n = sizes[k - 1]
            if not (1 <= x <= n and 1 <= y <= n):
                raise FormatError(f"triple ({k},{x},{y}) out of range for n={n}", lineno)
            triples.append((k - 1, x - 1, y - 1))
        try:
            events.append(BadEvent(len(events), triples))
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return sizes, events


def format_event_list(sizes: Sequence[int], events: Iterable[BadEvent]) -> str:
    out = [" ".join(["perms", str(len(sizes)), *map(str, sizes)])]
    for e in events:
        nums = [f"{k + 1} {x + 1} {y + 1}" for k, x, y in e.triples]
        out.append(f"event {len(e.triples)} " + " ".join(nums))
    return "\n".join(out) + "\n"
