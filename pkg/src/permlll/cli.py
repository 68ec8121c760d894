"""Command-line front end: ``permlll <command> [options]``.

Exit codes: 0 success, 1 invalid input, 2 iteration limit, 3 criterion not
satisfied (without ``--force``). JSON reports are the stable interface.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import verify
from .apps import (
    BlockGraph,
    ColorMatrix,
    CriterionFailed,
    Hypergraph,
    SolveResult,
    conjugate_transversal,
    cycles_of_length,
    independent_transversal,
    latin_transversal,
    minimal_packing_n,
    pack_hypergraphs,
    s_transversal,
    strong_color_iterative,
    strong_color_permutation,
)
from .apps.common import execute
from .criteria import check_asymmetric, fixed_point_weights
from .engine import EngineConfig, Instance
from .events import ExplicitList, FormatError, parse_event_list
from .parallel import ParallelConfig
from .perm import Permutation

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_LIMIT, EXIT_CRITERION = 0, 1, 2, 3


class InvalidInput(Exception):
    pass


def _read(path: str | None) -> str:
    if path is None:
        raise InvalidInput("--input is required")
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from None


def _one_based(values) -> list[int]:
    return [int(v) + 1 for v in values]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


# --- per-command solvers: (args, seed) -> (SolveResult, payload builder) ---------


def _configs(args, seed: int):
    config = EngineConfig(
        selection=args.select, max_resamplings=args.max_resamples, seed=seed
    )
    parallel = (
        ParallelConfig(seed=seed, max_rounds=args.max_rounds, mode=args.deps)
        if args.mode == "par"
        else None
    )
    return config, parallel


def _load_matrix(args) -> ColorMatrix:
    return ColorMatrix.from_csv(_read(args.input))


def solve_latin(args, seed):
    matrix = _load_matrix(args)
    config, parallel = _configs(args, seed)
    res = latin_transversal(matrix, config, args.force, parallel)
    return res, lambda r: {"permutation": _one_based(r.result.forward)}


def solve_s_transversal(args, seed):
    matrix = _load_matrix(args)
    config, parallel = _configs(args, seed)
    res = s_transversal(matrix, args.s, config, args.force, parallel)
    return res, lambda r: {"permutation": _one_based(r.result.forward), "s": args.s}


def _load_tau(args, n: int) -> Permutation:
    if args.tau:
        text = _read(args.tau).split()
        try:
            tau = Permutation.from_one_based(int(v) for v in text)
        except ValueError as exc:
            raise InvalidInput(f"bad permutation in {args.tau}: {exc}") from None
        if tau.n != n:
            raise InvalidInput(f"tau has size {tau.n}, matrix has size {n}")
        return tau
    try:
        return cycles_of_length(n, args.cycle_length)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def solve_rainbow(args, seed):
    matrix = _load_matrix(args)
    tau = _load_tau(args, matrix.n)
    config, parallel = _configs(args, seed)
    try:
        res = conjugate_transversal(matrix, tau, config, args.force, parallel)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    return res, lambda r: {
        "permutation": _one_based(r.result.forward),
        "sigma": _one_based(r.extra["sigma"].forward),
        "tau": _one_based(tau.forward),
    }


def _load_graph(args) -> BlockGraph:
    return BlockGraph.parse(_read(args.input))


def solve_strong_color(args, seed):
    graph = _load_graph(args)
    config, parallel = _configs(args, seed)
    if args.method == "iterative":
        res = strong_color_iterative(graph, config, args.force)
    else:
        res = strong_color_permutation(graph, config, args.force, parallel)
    return res, lambda r: {
        "coloring": _one_based(r.result),
        "blocks": [_one_based(b) for b in graph.blocks],
    }


def solve_independent_transversal(args, seed):
    graph = _load_graph(args)
    config, _ = _configs(args, seed)
    require = None
    if args.require is not None:
        require = args.require - 1
        if not 0 <= require < graph.n:
            raise InvalidInput(f"--require {args.require} is not a vertex")
    res = independent_transversal(graph, require, config, force=args.force)
    return res, lambda r: {"vertices": _one_based(r.result)}


def solve_pack(args, seed):
    h1 = Hypergraph.parse(_read(args.input))
    h2 = Hypergraph.parse(_read(args.input2)) if args.input2 else h1
    if h1.m and h2.m and h1.r != h2.r:
        raise InvalidInput("hypergraphs have different edge sizes")
    n = args.n if args.n is not None else minimal_packing_n(h1, h2)
    if n < max(h1.vertices, h2.vertices):
        raise InvalidInput(f"n = {n} is smaller than a vertex set")
    config, parallel = _configs(args, seed)
    res = pack_hypergraphs(h1, h2, n, config, args.force, parallel)
    return res, lambda r: {"n": n, "phi1": _one_based(r.result[0]), "phi2": _one_based(r.result[1])}


def _load_events(args):
    return parse_event_list(_read(args.input))


def _criterion_for(sizes, events, mode) -> dict:
    mu = fixed_point_weights(events, sizes, mode)
    if mu is None:
        return {"name": "weighted", "satisfied": False, "reason": "no weights satisfy the inequalities"}
    report = check_asymmetric(events, sizes, mu, mode)
    return {"name": "weighted", **report.summary()}


def solve_generic(args, seed):
    sizes, events = _load_events(args)
    criterion = _criterion_for(sizes, events, args.deps)
    if not criterion["satisfied"] and not args.force:
        raise CriterionFailed("criterion not satisfied", criterion)
    config, parallel = _configs(args, seed)
    outcome = execute(Instance(sizes, ExplicitList(events, sizes), "solve"), config, parallel)
    res = SolveResult(outcome.status, outcome.perms if outcome.success else None, criterion, outcome)
    return res, lambda r: {"permutations": [_one_based(p.forward) for p in r.result]}


SOLVERS = {
    "latin": solve_latin,
    "s-transversal": solve_s_transversal,
    "rainbow": solve_rainbow,
    "strong-color": solve_strong_color,
    "independent-transversal": solve_independent_transversal,
    "pack": solve_pack,
    "solve": solve_generic,
}


def _report(command: str, seed: int, res: SolveResult, payload, elapsed_ms: float) -> dict:
    rep = {
        "schema": SCHEMA,
        "command": command,
        "status": res.status,
        "seed": seed,
        "criterion": res.criterion,
        "elapsed_ms": round(elapsed_ms, 3),
    }
    outcome = res.outcome
    if outcome is not None:
        rep["resamples"] = outcome.stats.resamples
        rep["per_class"] = dict(sorted(outcome.stats.per_class.items()))
        if hasattr(outcome, "parallel"):
            rep["parallel"] = outcome.parallel.to_json()
    else:
        rep["resamples"] = res.extra.get("resamples", 0)
        rep["per_class"] = {}
    for key in ("attempts", "phases", "colored_counts"):
        if key in res.extra:
            rep[key] = res.extra[key]
    if res.success:
        rep["result"] = payload(res)
    return rep


def _aggregate(reports: list[dict]) -> dict:
    resamples = np.array([r.get("resamples", 0) for r in reports], dtype=float)
    ok = sum(1 for r in reports if r["status"] == "success")
    return {
        "runs": len(reports),
        "success_rate": ok / len(reports) if reports else 0.0,
        "resamples_mean": float(resamples.mean()) if len(resamples) else 0.0,
        "resamples_p50": float(np.percentile(resamples, 50)) if len(resamples) else 0.0,
        "resamples_p90": float(np.percentile(resamples, 90)) if len(resamples) else 0.0,
        "resamples_max": float(resamples.max()) if len(resamples) else 0.0,
    }


def _emit(obj: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(_jsonable(obj), sort_keys=True) + "\n")
        return
    runs = obj.get("runs_detail") or [obj]
    for r in runs:
        line = f"{r.get('command', '')} seed={r.get('seed', '-')} status={r['status']}"
        if "resamples" in r:
            line += f" resamples={r['resamples']}"
        if "error" in r:
            line += f" error={r['error']}"
        out.write(line + "\n")
    if "aggregate" in obj:
        agg = obj["aggregate"]
        out.write(
            f"runs={agg['runs']} success_rate={agg['success_rate']:.3f} "
            f"mean_resamples={agg['resamples_mean']:.1f}\n"
        )


def _error_report(command: str, message: str, status: str = "invalid-input", **extra) -> dict:
    return {"schema": SCHEMA, "command": command, "status": status, "error": message, **extra}


def run_solver(args, out) -> int:
    solver = SOLVERS[args.command]

    def one(seed: int) -> dict:
        start = time.perf_counter()
        res, payload = solver(args, seed)
        return _report(args.command, seed, res, payload, 1000 * (time.perf_counter() - start))

    seeds = range(args.seed, args.seed + args.runs)
    try:
        if verify.threads() > 1 and args.runs > 1:
            with ThreadPoolExecutor(max_workers=verify.threads()) as pool:
                reports = list(pool.map(one, seeds))
        else:
            reports = [one(seed) for seed in seeds]
    except CriterionFailed as exc:
        _emit(_error_report(args.command, str(exc), "criterion-failed", criterion=exc.criterion), args.format, out)
        return EXIT_CRITERION
    except (InvalidInput, FormatError) as exc:
        _emit(_error_report(args.command, str(exc)), args.format, out)
        return EXIT_INVALID
    code = EXIT_OK if all(r["status"] == "success" for r in reports) else EXIT_LIMIT
    if args.runs == 1:
        _emit(reports[0], args.format, out)
    else:
        _emit({"schema": SCHEMA, "command": args.command, "status": "success" if code == 0 else "iteration-limit",
               "runs_detail": reports, "aggregate": _aggregate(reports)}, args.format, out)
    return code


def run_criterion(args, out) -> int:
    try:
        sizes, events = _load_events(args)
        if args.weights:
            mu = {}
            for lineno, line in enumerate(_read(args.weights).splitlines(), start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    eid, value = line.split()
                    mu[int(eid) - 1] = float(value)
                except ValueError:
                    raise FormatError("expected 'event_id weight'", lineno) from None
        else:
            mu = fixed_point_weights(events, sizes, args.deps)
    except (InvalidInput, FormatError) as exc:
        _emit(_error_report("criterion", str(exc)), args.format, out)
        return EXIT_INVALID
    if mu is None:
        rep = {"schema": SCHEMA, "command": "criterion", "status": "criterion-failed",
               "criterion": {"satisfied": False, "reason": "no weights satisfy the inequalities"}}
        _emit(rep, args.format, out)
        return EXIT_CRITERION
    try:
        report = check_asymmetric(events, sizes, mu, args.deps)
    except ValueError as exc:
        _emit(_error_report("criterion", str(exc)), args.format, out)
        return EXIT_INVALID
    rep = {
        "schema": SCHEMA,
        "command": "criterion",
        "status": "success" if report.satisfied else "criterion-failed",
        "criterion": report.to_json(one_based=True),
        "weights": {str(k + 1): v for k, v in sorted(mu.items())},
    }
    _emit(rep, args.format, out)
    return EXIT_OK if report.satisfied else EXIT_CRITERION


def run_verify(args, out) -> int:
    names = args.check or list(verify.CHECKS)
    results = {}
    details = {}
    for name in names:
        try:
            passed, detail = verify.run_check(name, args.trials)
        except ValueError as exc:
            _emit(_error_report("verify", str(exc)), args.format, out)
            return EXIT_INVALID
        results[name] = "pass" if passed else "fail"
        details[name] = detail
    if args.format == "json":
        payload = dict(results)
        if args.details:
            payload["details"] = details
        out.write(json.dumps(_jsonable(payload), sort_keys=True) + "\n")
    else:
        for name, status in results.items():
            out.write(f"{name}: {status}\n")
    return EXIT_OK if all(v == "pass" for v in results.values()) else EXIT_LIMIT


def run_bench(args, out) -> int:
    """Latin transversals on generated matrices; reports wall time per run."""
    matrix = ColorMatrix.with_multiplicity(args.n, args.delta, args.seed)
    times, resamples, rounds = [], [], []
    for seed in range(args.seed, args.seed + args.runs):
        config, parallel = _configs(args, seed)
        start = time.perf_counter()
        res = latin_transversal(matrix, config, True, parallel)
        times.append(1000 * (time.perf_counter() - start))
        resamples.append(res.outcome.stats.resamples if res.outcome else 0)
        if parallel is not None and res.outcome is not None:
            rounds.append(res.outcome.parallel.rounds)
    rep = {
        "schema": SCHEMA,
        "command": "bench",
        "n": args.n,
        "delta": args.delta,
        "runs": args.runs,
        "ms_mean": float(np.mean(times)),
        "resamples_mean": float(np.mean(resamples)),
    }
    if rounds:
        rep["rounds_max"] = max(rounds)
    _emit({**rep, "status": "success"}, args.format, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--runs", type=int, default=1, help="number of consecutive seeds")
    common.add_argument("--max-resamples", type=int, default=10**7)
    common.add_argument("--max-rounds", type=int, default=1000, help="round cap in parallel mode")
    common.add_argument("--select", choices=["first", "random"], default="first")
    common.add_argument("--mode", choices=["seq", "par"], default="seq")
    common.add_argument("--deps", choices=["standard", "lopsided"], default="standard")
    common.add_argument("--force", action="store_true", help="run even if the criterion fails")
    common.add_argument("--format", choices=["json", "text"], default="json")

    parser = argparse.ArgumentParser(prog="permlll", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("latin", parents=[common], help="Latin transversal of a CSV color matrix")
    p = sub.add_parser("s-transversal", parents=[common], help="transversal with each color at most s times")
    p.add_argument("--s", type=int, required=True)
    p = sub.add_parser("rainbow", parents=[common], help="Latin transversal conjugate to tau")
    p.add_argument("--tau", help="file with a 1-based permutation")
    p.add_argument("--cycle-length", type=int, default=3, help="use disjoint cycles of this length")
    p = sub.add_parser("strong-color", parents=[common], help="strong coloring of a block graph")
    p.add_argument("--method", choices=["permutation", "iterative"], default="permutation")
    p = sub.add_parser("independent-transversal", parents=[common], help="one independent vertex per block")
    p.add_argument("--require", type=int, help="1-based vertex that must be chosen")
    p = sub.add_parser("pack", parents=[common], help="edge-disjoint packing of two hypergraphs")
    p.add_argument("--input2", help="second hypergraph (default: same as --input)")
    p.add_argument("--n", type=int, help="target size (default: smallest passing the criterion)")
    sub.add_parser("solve", parents=[common], help="generic event-list instance")
    p = sub.add_parser("criterion", parents=[common], help="check the weighted criterion for an event list")
    p.add_argument("--weights", help="file of 'event_id weight' lines (default: boundary weights)")
    p = sub.add_parser("verify", parents=[common], help="run built-in correctness checks")
    p.add_argument("--check", action="append", choices=verify.CHECKS)
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--details", action="store_true")
    p = sub.add_parser("bench", parents=[common], help="time Latin transversal runs")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--delta", type=int, default=6)
    return parser


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.runs < 1 or args.max_resamples < 1 or args.max_rounds < 1:
        _emit(_error_report(args.command, "--runs, --max-resamples and --max-rounds must be positive"),
              args.format, out)
        return EXIT_INVALID
    if args.command == "criterion":
        return run_criterion(args, out)
    if args.command == "verify":
        return run_verify(args, out)
    if args.command == "bench":
        return run_bench(args, out)
    return run_solver(args, out)


if __name__ == "__main__":
    sys.exit(main())
