"""Pieces shared by the application solvers."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from ..engine import ITERATION_LIMIT, SUCCESS, EngineConfig, Instance, Outcome, run
from ..parallel import ParallelConfig, run_parallel


class CriterionFailed(Exception):
    """The instance fails its sufficient condition and ``force`` was not set."""

    def __init__(self, message: str, criterion: dict):
        super().__init__(message)
        self.criterion = criterion


def gate(criterion: dict, force: bool) -> None:
    if criterion.get("satisfied", True):
        return
    message = f"criterion not satisfied: {criterion}"
    if not force:
        raise CriterionFailed(message, criterion)
    warnings.warn(message + " (running anyway)", stacklevel=3)


@dataclass
class SolveResult:
    status: str
    result: object
    criterion: dict
    outcome: Outcome | None = None
    extra: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.status == SUCCESS


def execute(
    instance: Instance,
    config: EngineConfig | None,
    parallel: ParallelConfig | None,
) -> Outcome:
    if parallel is not None:
        return run_parallel(instance, parallel)
    return run(instance, config or EngineConfig())


def iteration_limit(criterion: dict, outcome: Outcome | None = None, **extra) -> SolveResult:
    return SolveResult(ITERATION_LIMIT, None, criterion, outcome, extra)


class GroupedRows:
    """Rows ``x`` grouped by the color of cell ``(x, f(x))``.

    ``over`` holds the colors whose group has reached ``threshold`` rows.
    """

    def __init__(self, rows: list[list[int]], f: list[int], threshold: int):
        self.rows = rows
        self.threshold = threshold
        self.color = [rows[x][f[x]] for x in range(len(f))]
        self.members: dict[int, set[int]] = {}
        for x, c in enumerate(self.color):
            self.members.setdefault(c, set()).add(x)
        self.over = {c for c, m in self.members.items() if len(m) >= threshold}

    def update(self, x: int, fx: int) -> None:
        new = self.rows[x][fx]
        old = self.color[x]
        if new == old:
            return
        members = self.members
        group = members[old]
        group.discard(x)
        if len(group) < self.threshold:
            self.over.discard(old)
        group = members.setdefault(new, set())
        group.add(x)
        if len(group) >= self.threshold:
            self.over.add(new)
        self.color[x] = new
