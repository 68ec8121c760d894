"""The sequential Swapping Algorithm.

Start from independent uniform permutations; while some bad-event is true,
pick one and resample it by calling :func:`~permlll.perm.swap` once per
permutation it involves.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .events import FIRST, SELECTIONS, STANDARD, BadEvent, ViolationOracle, is_true
from .perm import Permutation, random_permutation, swap, swap_with_mates
from .rng import Rng

SUCCESS = "success"
ITERATION_LIMIT = "iteration-limit"


@dataclass
class Instance:
    sizes: list[int]
    oracle: ViolationOracle
    name: str = "instance"

    @property
    def events(self) -> list[BadEvent] | None:
        return self.oracle.events


@dataclass
class EngineConfig:
    selection: str = FIRST
    max_resamplings: int = 10_000_000
    seed: int = 0
    record_log: bool = True
    priority: Callable[[BadEvent], float] | None = None

    def __post_init__(self):
        if self.max_resamplings < 1:
            raise ValueError("max_resamplings must be >= 1")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        if self.selection == "priority" and self.priority is None:
            raise ValueError("priority selection needs a priority function")


@dataclass
class LogEntry:
    t: int
    event: BadEvent
    # (k, domain points swapped, mates) per permutation, in swap order
    swaps: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]


@dataclass
class RunStats:
    resamples: int = 0
    per_class: Counter = field(default_factory=Counter)
    per_event: Counter = field(default_factory=Counter)
    swaps_per_perm: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "resamples": self.resamples,
            "per_class": dict(sorted(self.per_class.items())),
            "swaps_per_perm": list(self.swaps_per_perm),
        }


@dataclass
class Outcome:
    status: str
    perms: list[Permutation]
    log: list[LogEntry]
    stats: RunStats
    initial: list[Permutation] | None = None

    @property
    def success(self) -> bool:
        return self.status == SUCCESS


def initial_permutations(sizes: Sequence[int], seed: int) -> list[Permutation]:
    rng = Rng.stream(seed, "init")
    return [random_permutation(n, rng) for n in sizes]


def run(
    instance: Instance,
    config: EngineConfig | None = None,
    initial: Sequence[Permutation] | None = None,
    keep_initial: bool = False,
) -> Outcome:
    """Run the Swapping Algorithm to success or ``config.max_resamplings``.

    Hitting the cap is a normal outcome: the permutations are returned with
    status ``"iteration-limit"``.
    """
    config = config or EngineConfig()
    if initial is None:
        perms = initial_permutations(instance.sizes, config.seed)
    else:
        perms = [p.copy() for p in initial]
        if [p.n for p in perms] != list(instance.sizes):
            raise ValueError("initial permutations do not match instance sizes")
    start = [p.copy() for p in perms] if keep_initial else None
    rng = Rng.stream(config.seed, "resample")
    oracle = instance.oracle
    tracker = oracle.tracker(perms)
    stats = RunStats(swaps_per_perm=[0] * len(perms))
    log: list[LogEntry] = []
    record = config.record_log
    selection, priority = config.selection, config.priority
    t = 0
    while True:
        event = tracker.pick(selection, rng, priority)
        if event is None:
            status = SUCCESS
            break
        if t >= config.max_resamplings:
            status = ITERATION_LIMIT
            break
        t += 1
        done = []
        for k, xs in oracle.resample_targets(event, rng):
            mates = swap(perms[k], xs, rng)
            tracker.touched(k, (*xs, *mates))
            stats.swaps_per_perm[k] += 1
            if record:
                done.append((k, tuple(xs), tuple(mates)))
        stats.per_class[event.kind] += 1
        stats.per_event[event.id] += 1
        if record:
            log.append(LogEntry(t, event, tuple(done)))
    stats.resamples = t
    return Outcome(status, perms, log, stats, start)


def replay(
    initial: Sequence[Permutation],
    entries: Sequence[LogEntry],
    oracle: ViolationOracle | None = None,
) -> list[Permutation]:
    """Re-run a log with its recorded mates from ``initial``.

    With an ``oracle``, each event is checked to be true when its turn
    comes, as the sequential algorithm requires; a false event raises.
    """
    perms = [p.copy() for p in initial]
    for entry in entries:
        if oracle is not None and not is_true(entry.event, perms):
            raise ValueError(f"log entry {entry.t}: event {entry.event.id} is not true")
        for k, xs, mates in entry.swaps:
            swap_with_mates(perms[k], xs, mates)
    return perms


def format_log(log: Sequence[LogEntry]) -> str:
    """One line per entry: ``t event_id k x y mate ...`` (1-based; ``-`` if not swapped)."""
    lines = []
    for entry in log:
        mate_of = {}
        for k, xs, mates in entry.swaps:
            for x, z in zip(xs, mates):
                mate_of[(k, x)] = z
        parts = [str(entry.t), str(entry.event.id + 1)]
        for k, x, y in entry.event.triples:
            z = mate_of.get((k, x))
            parts += [str(k + 1), str(x + 1), str(y + 1), "-" if z is None else str(z + 1)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_log(text: str, events_by_id: dict[int, BadEvent]) -> list[LogEntry]:
    """Inverse of :func:`format_log`, given the events the ids refer to."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        t, eid = int(parts[0]), int(parts[1]) - 1
        event = events_by_id[eid]
        swaps: dict[int, tuple[list[int], list[int]]] = {}
        rest = parts[2:]
        if len(rest) != 4 * len(event.triples):
            raise ValueError(f"log line {lineno}: wrong number of fields")
        for j in range(0, len(rest), 4):
            k, x = int(rest[j]) - 1, int(rest[j + 1]) - 1
            if rest[j + 3] != "-":
                xs, ms = swaps.setdefault(k, ([], []))
                xs.append(x)
                ms.append(int(rest[j + 3]) - 1)
        entries.append(
            LogEntry(t, event, tuple((k, tuple(xs), tuple(ms)) for k, (xs, ms) in swaps.items()))
        )
    return entries


def all_true_after(instance: Instance, perms: Sequence[Permutation]) -> list[BadEvent]:
    return instance.oracle.all_true(perms)


__all__ = [
    "EngineConfig",
    "Instance",
    "LogEntry",
    "Outcome",
    "RunStats",
    "SUCCESS",
    "ITERATION_LIMIT",
    "STANDARD",
    "format_log",
    "initial_permutations",
    "parse_log",
    "replay",
    "run",
]
