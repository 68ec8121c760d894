"""Constructive local lemma for random permutations.

The Swapping Algorithm (sequential and simulated-parallel), criterion
checkers, witness-tree diagnostics, exact distribution oracles, and
application solvers for transversals, strong colorings and packings.
"""

from .criteria import (
    CriterionReport,
    check_asymmetric,
    check_packing,
    check_symmetric,
    check_szabo,
    fixed_point_weights,
    mu_from_x,
    solve_alpha,
)
from .engine import EngineConfig, Instance, LogEntry, Outcome, format_log, replay, run
from .events import (
    LOPSIDED,
    STANDARD,
    BadEvent,
    ExplicitList,
    Triple,
    ViolationOracle,
    depends,
    is_true,
    neighborhood,
    parse_event_list,
    prob_omega,
)
from .parallel import ParallelConfig, greedy_mis, lfmis, run_parallel
from .perm import Permutation, apply_transpositions, random_permutation, swap, swap_range
from .rng import Rng
from .witness import build_witness_tree, mt_bound, project_witness_subdag

__version__ = "0.1.0"

__all__ = [
    "BadEvent",
    "CriterionReport",
    "EngineConfig",
    "ExplicitList",
    "Instance",
    "LOPSIDED",
    "LogEntry",
    "Outcome",
    "ParallelConfig",
    "Permutation",
    "Rng",
    "STANDARD",
    "Triple",
    "ViolationOracle",
    "apply_transpositions",
    "build_witness_tree",
    "check_asymmetric",
    "check_packing",
    "check_symmetric",
    "check_szabo",
    "depends",
    "fixed_point_weights",
    "format_log",
    "greedy_mis",
    "is_true",
    "lfmis",
    "mt_bound",
    "mu_from_x",
    "neighborhood",
    "parse_event_list",
    "prob_omega",
    "project_witness_subdag",
    "random_permutation",
    "replay",
    "run",
    "run_parallel",
    "solve_alpha",
    "swap",
    "swap_range",
]
