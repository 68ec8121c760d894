"""Brute-force oracles for the randomized pieces.

Exact distributions of Swap come from two independent routes: a direct
recursive enumerator and an odometer that drives the real implementation
through every branch of its random choices. Probabilities are exact
rationals throughout. The Monte Carlo harness covers the statements that
are only checkable statistically.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from collections.abc import Callable, Hashable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np

from .engine import EngineConfig, Instance, run
from .events import BadEvent, ExplicitList, is_true
from .criteria import check_asymmetric, fixed_point_weights
from .perm import Permutation, swap, swap_range
from .rng import Rng
from .witness import build_witness_tree, mt_bound

MAX_ENUM_N = 8
MAX_ENUM_R = 4


class ExactDistribution:
    """Outcome → exact probability."""

    def __init__(self, probs: Mapping[Hashable, Fraction]):
        self.probs = {k: Fraction(v) for k, v in probs.items() if v}

    @classmethod
    def from_counts(cls, counts: Mapping[Hashable, int], total: int) -> "ExactDistribution":
        return cls({k: Fraction(c, total) for k, c in counts.items()})

    def __getitem__(self, key) -> Fraction:
        return self.probs.get(key, Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, ExactDistribution):
            return self.probs == other.probs
        return NotImplemented

    def __repr__(self) -> str:
        return f"ExactDistribution({len(self.probs)} outcomes)"

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def map(self, fn: Callable) -> "ExactDistribution":
        out: dict = {}
        for k, p in self.probs.items():
            key = fn(k)
            out[key] = out.get(key, Fraction(0)) + p
        return ExactDistribution(out)

    def prob(self, predicate: Callable[[Hashable], bool]) -> Fraction:
        return sum((p for k, p in self.probs.items() if predicate(k)), Fraction(0))


def _guard(n: int, r: int) -> None:
    if n > MAX_ENUM_N or r > MAX_ENUM_R:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUM_N}, r <= {MAX_ENUM_R}")


def _falling(n: int, r: int) -> int:
    return math.perm(n, r) if 0 <= r <= n else 0


def enumerate_swap(pi: Sequence[int] | Permutation, xs: Sequence[int]) -> ExactDistribution:
    """Distribution of ``Swap(π; xs)`` by walking every mate choice.

    Written independently of :func:`permlll.perm.swap`; outcomes are
    forward tuples.
    """
    f0 = list(pi.forward if isinstance(pi, Permutation) else pi)
    n, r = len(f0), len(xs)
    _guard(n, r)
    counts: Counter = Counter()

    def walk(f: list[int], i: int) -> None:
        if i == r:
            counts[tuple(f)] += 1
            return
        x = xs[i]
        for z in range(n):
            if z in xs[:i]:
                continue
            g = f.copy()
            g[x], g[z] = g[z], g[x]
            walk(g, i + 1)

    walk(f0, 0)
    return ExactDistribution.from_counts(counts, _falling(n, r))


def enumerate_swap_range(pi: Sequence[int] | Permutation, ys: Sequence[int]) -> ExactDistribution:
    """Distribution of the range-side variant, enumerated directly."""
    f0 = list(pi.forward if isinstance(pi, Permutation) else pi)
    n, r = len(f0), len(ys)
    _guard(n, r)
    counts: Counter = Counter()

    def walk(f: list[int], i: int) -> None:
        if i == r:
            counts[tuple(f)] += 1
            return
        for w in range(n):
            if w in ys[:i]:
                continue
            a, b = f.index(ys[i]), f.index(w)
            g = f.copy()
            g[a], g[b] = g[b], g[a]
            walk(g, i + 1)

    walk(f0, 0)
    return ExactDistribution.from_counts(counts, _falling(n, r))


class BranchRng:
    """Stand-in generator that replays a fixed list of ``below`` answers."""

    def __init__(self, script: list[int]):
        self.script = script
        self.limits: list[int] = []

    def below(self, k: int) -> int:
        i = len(self.limits)
        self.limits.append(k)
        if i < len(self.script):
            return self.script[i]
        self.script.append(0)
        return 0


def enumerate_branches(fn: Callable[[BranchRng], Hashable]) -> ExactDistribution:
    """Exact distribution of ``fn(rng)`` over all its ``rng.below`` outcomes.

    ``fn`` must draw only through ``below``; branches are walked like an
    odometer and each is weighted by the product of ``1/k`` over its draws.
    """
    probs: dict = {}
    script: list[int] = []
    while True:
        rng = BranchRng(script)
        outcome = fn(rng)
        weight = Fraction(1)
        for k in rng.limits:
            weight /= k
        probs[outcome] = probs.get(outcome, Fraction(0)) + weight
        limits = rng.limits
        del script[len(limits):]
        i = len(limits) - 1
        while i >= 0 and script[i] + 1 >= limits[i]:
            i -= 1
        if i < 0:
            return ExactDistribution(probs)
        script[i] += 1
        del script[i + 1:]


def implementation_swap_distribution(pi: Sequence[int], xs: Sequence[int]) -> ExactDistribution:
    def once(rng):
        p = Permutation(pi)
        swap(p, xs, rng)
        return p.as_tuple()

    return enumerate_branches(once)


def implementation_swap_range_distribution(pi: Sequence[int], ys: Sequence[int]) -> ExactDistribution:
    def once(rng):
        p = Permutation(pi)
        swap_range(p, ys, rng)
        return p.as_tuple()

    return enumerate_branches(once)


# --- exact checks ------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    passed: bool
    cases: int = 0
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"passed": self.passed, "cases": self.cases, **self.detail}


def _ordered_subsets(n: int, r_max: int):
    for r in range(min(r_max, n) + 1):
        yield from permutations(range(n), r)


def check_swap_marginals(n_max: int = 5, r_max: int = 3, bases: int = 20, seed: int = 0) -> CheckReport:
    """``(π'(x_1), …, π'(x_r))`` is uniform over ordered distinct tuples.

    Both the direct enumerator and the implementation-driven one are
    checked, and must agree.
    """
    rng = Rng.stream(seed, "marginals")
    cases = 0
    for n in range(1, n_max + 1):
        for _ in range(bases):
            pi = list(range(n))
            rng.shuffle(pi)
            for r in range(min(r_max, n) + 1):
                xs = tuple(rng.sample(range(n), r))
                direct = enumerate_swap(pi, xs)
                driven = implementation_swap_distribution(pi, xs)
                if direct != driven or direct.total() != 1:
                    return CheckReport("swap-marginals", False, cases, {"pi": pi, "xs": xs})
                marginal = direct.map(lambda f: tuple(f[x] for x in xs))
                want = Fraction(1, _falling(n, r))
                tuples = set(permutations(range(n), r))
                if set(marginal.probs) != tuples or any(p != want for p in marginal.probs.values()):
                    return CheckReport("swap-marginals", False, cases, {"pi": pi, "xs": xs})
                cases += 1
    return CheckReport("swap-marginals", True, cases)


def _compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """a∘b."""
    return tuple(a[y] for y in b)


def _inverse(a: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(a)
    for x, y in enumerate(a):
        out[y] = x
    return tuple(out)


def check_symmetries(n_max: int = 4, r_max: int = 3) -> CheckReport:
    """Relabeling, order invariance, and Swap vs range-side Swap, exactly.

    Distributions come from the real implementation; relabeling uses every
    domain and every range relabeling.
    """
    cases = 0
    for n in range(1, n_max + 1):
        perms = list(permutations(range(n)))
        cache: dict = {}

        def dist(pi, xs):
            key = (pi, xs)
            if key not in cache:
                cache[key] = implementation_swap_distribution(pi, xs)
            return cache[key]

        for pi in perms:
            for xs in _ordered_subsets(n, r_max):
                base = dist(pi, xs)
                if base.total() != 1:
                    return CheckReport("symmetries", False, cases, {"total": str(base.total())})
                for tau in perms:
                    tinv = _inverse(tau)
                    # domain relabeling: Swap(πτ; τ⁻¹xs) = στ
                    lhs = dist(_compose(pi, tau), tuple(tinv[x] for x in xs))
                    if lhs != base.map(lambda s: _compose(s, tau)):
                        return CheckReport("symmetries", False, cases,
                                           {"kind": "domain", "pi": pi, "xs": xs, "tau": tau})
                    # range relabeling: Swap(τπ; xs) = τσ
                    lhs = dist(_compose(tau, pi), xs)
                    if lhs != base.map(lambda s: _compose(tau, s)):
                        return CheckReport("symmetries", False, cases,
                                           {"kind": "range", "pi": pi, "xs": xs, "tau": tau})
                    cases += 2
                for order in permutations(xs):
                    if dist(pi, order) != base:
                        return CheckReport("symmetries", False, cases,
                                           {"kind": "order", "pi": pi, "xs": xs, "order": order})
                    cases += 1
                ys = tuple(pi[x] for x in xs)
                if implementation_swap_range_distribution(pi, ys) != base:
                    return CheckReport("symmetries", False, cases,
                                       {"kind": "range-swap", "pi": pi, "ys": ys})
                if enumerate_swap_range(pi, ys) != enumerate_swap(pi, xs):
                    return CheckReport("symmetries", False, cases,
                                       {"kind": "range-swap-direct", "pi": pi, "ys": ys})
                cases += 2
    return CheckReport("symmetries", True, cases)


def g_bound(n: int, r: int, s: int, q: int) -> Fraction:
    """``(n-r)!(n-q)! / (n!(n-q-r+s)!)``."""
    if not (0 <= s <= min(q, r)) or q + r - s > n or min(n, r, q) < 0:
        raise ValueError(f"need 0 <= s <= min(q, r) and q + r - s <= n; got n={n} r={r} s={s} q={q}")
    return Fraction(
        math.factorial(n - r) * math.factorial(n - q),
        math.factorial(n) * math.factorial(n - q - r + s),
    )


def leading_matches(xs: Sequence[int], ys: Sequence[int], constraints: Sequence[tuple[int, int]]) -> int:
    """Largest s with ``x_i = x'_i`` or ``y_i = y'_i`` for every ``i < s``."""
    s = 0
    for (x, y), (x2, y2) in zip(zip(xs, ys), constraints):
        if x == x2 or y == y2:
            s += 1
        else:
            break
    return s


def _constraint_lists(n: int) -> list[tuple[tuple[int, int], ...]]:
    out = []
    for q in range(n + 1):
        for xp in permutations(range(n), q):
            for yp in permutations(range(n), q):
                out.append(tuple(zip(xp, yp)))
    return out


def _exhaustive_prop51(n: int, r_max: int) -> tuple[int, dict | None]:
    perms = list(permutations(range(n)))
    pindex = {p: i for i, p in enumerate(perms)}
    lists = _constraint_lists(n)
    q_of = np.array([len(c) for c in lists])
    pad_x = np.full((len(lists), n), -1)
    pad_y = np.full((len(lists), n), -1)
    for j, c in enumerate(lists):
        for i, (x, y) in enumerate(c):
            pad_x[j, i], pad_y[j, i] = x, y
    # sat[p, j]: permutation p meets every constraint of list j
    sat = np.ones((len(perms), len(lists)), dtype=bool)
    parr = np.array(perms)
    for i in range(n):
        active = pad_x[:, i] >= 0
        vals = parr[:, np.where(active, pad_x[:, i], 0)]
        ok = (vals == pad_y[:, i][None, :]) | ~active[None, :]
        sat &= ok
    sat_int = sat.astype(np.int64)
    ff = np.array([[_falling(a, b) for b in range(n + 1)] for a in range(n + 1)])
    checked = 0
    for pi in perms:
        for xs in _ordered_subsets(n, r_max):
            r = len(xs)
            ys = [pi[x] for x in xs]
            counts = np.zeros(len(perms), dtype=np.int64)
            for outcome, p in enumerate_swap(pi, xs).probs.items():
                counts[pindex[outcome]] = int(p * _falling(n, r))
            hits = counts @ sat_int
            match = np.ones(len(lists), dtype=bool)
            s = np.zeros(len(lists), dtype=np.int64)
            for i in range(r):
                match &= (i < q_of) & ((pad_x[:, i] == xs[i]) | (pad_y[:, i] == ys[i]))
                s += match
            valid = q_of + r - s <= n
            # prob = hits / (n)_r and the bound reduces to hits <= (n-q)_(r-s)
            limit = ff[np.clip(n - q_of, 0, n), np.clip(r - s, 0, n)]
            bad = valid & (hits > limit)
            checked += int(valid.sum())
            if bad.any():
                j = int(np.argmax(bad))
                return checked, {
                    "n": n, "pi": list(pi), "xs": list(xs), "constraints": [list(c) for c in lists[j]],
                    "s": int(s[j]), "prob": str(Fraction(int(hits[j]), _falling(n, r))),
                    "bound": str(g_bound(n, r, int(s[j]), int(q_of[j]))),
                }
    return checked, None


def _sample_prop51(n: int, samples: int, rng: Rng, r_max: int) -> tuple[int, dict | None]:
    done = 0
    while done < samples:
        pi = list(range(n))
        rng.shuffle(pi)
        r = rng.below(min(r_max, n) + 1)
        xs = rng.sample(range(n), r)
        ys = [pi[x] for x in xs]
        q = rng.below(n + 1)
        xp: list[int] = []
        yp: list[int] = []
        for i in range(q):
            if i < r and rng.below(3):
                if rng.below(2):
                    x2, y2 = xs[i], rng.below(n)
                else:
                    x2, y2 = rng.below(n), ys[i]
            else:
                x2, y2 = rng.below(n), rng.below(n)
            xp.append(x2)
            yp.append(y2)
        if len(set(xp)) != q or len(set(yp)) != q:
            continue
        constraints = list(zip(xp, yp))
        s = min(leading_matches(xs, ys, constraints), q, r)
        if q + r - s > n:
            continue
        dist = enumerate_swap(pi, xs)
        prob = dist.prob(lambda f: all(f[a] == b for a, b in constraints))
        bound = g_bound(n, r, s, q)
        done += 1
        if prob > bound:
            return done, {"n": n, "pi": pi, "xs": xs, "constraints": constraints,
                          "s": s, "prob": str(prob), "bound": str(bound)}
    return done, None


def check_prop51(n_max: int = 6, samples: int = 1000, seed: int = 0, exhaustive_max: int = 4) -> CheckReport:
    """Exact constraint probabilities after Swap never exceed ``g_bound``.

    Every configuration is tried for n ≤ ``exhaustive_max``; above that,
    ``samples`` random ones per n. Each configuration is checked at the
    largest admissible s, where the bound is tightest.
    """
    if n_max > 6:
        raise ValueError("n_max must be <= 6")
    rng = Rng.stream(seed, "prop51")
    total = 0
    for n in range(1, n_max + 1):
        if n <= exhaustive_max:
            checked, bad = _exhaustive_prop51(n, min(n, MAX_ENUM_R))
        else:
            checked, bad = _sample_prop51(n, samples, rng, MAX_ENUM_R)
        total += checked
        if bad is not None:
            return CheckReport("prop51", False, total, {"counterexample": bad})
    return CheckReport("prop51", True, total)


# --- Monte Carlo harness --------------------------------------------------------


@dataclass
class MonteCarloResult:
    passed: bool
    estimate: float
    se: float
    z: float
    bound: float
    trials: int

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "estimate": self.estimate,
            "se": self.se,
            "z": self.z if math.isfinite(self.z) else str(self.z),
            "bound": self.bound,
            "trials": self.trials,
        }


SIGMAS = 4.0


def judge(values: Sequence[float] | np.ndarray, bound: float, binary: bool) -> MonteCarloResult:
    """Pass iff the sample mean is at most ``bound`` plus four standard errors."""
    v = np.asarray(values, dtype=float)
    n = len(v)
    est = float(v.mean()) if n else 0.0
    if binary:
        se = math.sqrt(est * (1 - est) / n) if n else 0.0
    else:
        se = float(v.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    diff = est - bound
    if se > 0:
        z = diff / se
    else:
        z = 0.0 if diff <= 0 else math.inf
    return MonteCarloResult(diff <= SIGMAS * se, est, se, z, bound, n)


def threads() -> int:
    try:
        return max(1, int(os.environ.get("PERM_LLL_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(runner: Callable[[int], object], trials: int, start: int = 1) -> list:
    """``runner(seed)`` for seeds ``start .. start+trials-1``, in seed order."""
    seeds = range(start, start + trials)
    workers = threads()
    if workers == 1:
        return [runner(s) for s in seeds]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(runner, seeds, chunksize=256))


def monte_carlo_bound(
    runner: Callable[[int], object],
    indicator: Callable[[object], float],
    bound: float,
    trials: int,
    binary: bool = True,
) -> MonteCarloResult:
    """Compare the mean of ``indicator(runner(seed))`` with ``bound``."""
    if trials < 1:
        raise ValueError("trials must be positive")
    values = [indicator(x) for x in run_trials(runner, trials)]
    return judge(values, bound, binary)


# --- the tiny instance and its experiments ----------------------------------------


def tiny_instance() -> tuple[list[int], list[BadEvent]]:
    """One permutation of size 4 and three events.

    Events 0 and 1 are single triples on disjoint slices; event 2 shares
    a domain slot with 0 and a range value with 1.
    """
    events = [
        BadEvent(0, [(0, 0, 0)]),
        BadEvent(1, [(0, 1, 1)]),
        BadEvent(2, [(0, 0, 1), (0, 2, 2)]),
    ]
    return [4], events


TINY_CONJUNCTIONS = [
    [(0, 0, 1)],
    [(0, 3, 3)],
    [(0, 2, 2)],
    [(0, 0, 2), (0, 1, 3)],
    [(0, 3, 0), (0, 1, 2)],
]


def small_trees(events: Sequence[BadEvent], mode: str = "standard") -> dict:
    """Every witness tree with at most two nodes, keyed like ``WitnessTree.key``."""
    from .events import depends

    out = {}
    for root in events:
        out[(root.id, ())] = [root]
        for child in events:
            if depends(root, child, mode):
                out[(root.id, ((child.id, ()),))] = [root, child]
    return out


def _trees_in_log(events_seq: Sequence[BadEvent], max_nodes: int = 2) -> set:
    keys = set()
    for t in range(1, len(events_seq) + 1):
        tree = build_witness_tree(events_seq, t)
        if len(tree) <= max_nodes:
            keys.add(tree.key())
    return keys


def witness_tree_experiment(trials: int, start: int = 1) -> dict:
    """Appearance frequency of each ≤2-node witness tree on the tiny instance."""
    sizes, events = tiny_instance()
    oracle = ExplicitList(events, sizes)
    instance = Instance(sizes, oracle, "tiny")
    trees = small_trees(events)
    hits: Counter = Counter()

    def one(seed: int) -> set:
        out = run(instance, EngineConfig(seed=seed))
        return _trees_in_log([e.event for e in out.log])

    for keys in run_trials(one, trials, start):
        hits.update(keys)
    results = {}
    for key, nodes in trees.items():
        bound = math.prod(float(Fraction(1, math.perm(4, len(e)))) for e in nodes)
        p = hits[key] / trials
        se = math.sqrt(p * (1 - p) / trials)
        diff = p - bound
        z = diff / se if se > 0 else (0.0 if diff <= 0 else math.inf)
        results[repr(key)] = MonteCarloResult(diff <= SIGMAS * se, p, se, z, bound, trials)
    return results


def boundary_weights() -> dict[int, float]:
    sizes, events = tiny_instance()
    mu = fixed_point_weights(events, sizes)
    if mu is None:
        raise RuntimeError("tiny instance has no boundary weights")
    return mu


def expectation_experiment(trials: int, start: int = 1) -> dict:
    """Mean resamplings of each tiny-instance event against its boundary weight."""
    sizes, events = tiny_instance()
    mu = boundary_weights()
    report = check_asymmetric(events, sizes, mu)
    instance = Instance(sizes, ExplicitList(events, sizes), "tiny")

    def one(seed: int):
        return run(instance, EngineConfig(seed=seed, record_log=False)).stats.per_event

    runs = run_trials(one, trials, start)
    out = {"criterion_satisfied": report.satisfied}
    for e in events:
        out[str(e.id)] = judge([c[e.id] for c in runs], mu[e.id], binary=False)
    return out


def distribution_experiment(trials: int, start: int = 1, conjunctions=None) -> dict:
    """How often each conjunction holds in the final output, against its bound."""
    sizes, events = tiny_instance()
    mu = boundary_weights()
    instance = Instance(sizes, ExplicitList(events, sizes), "tiny")
    conjunctions = conjunctions or TINY_CONJUNCTIONS
    conj_events = [BadEvent(-1 - i, c) for i, c in enumerate(conjunctions)]

    def one(seed: int):
        out = run(instance, EngineConfig(seed=seed, record_log=False))
        return [is_true(c, out.perms) for c in conj_events]

    runs = run_trials(one, trials, start)
    out = {}
    for i, c in enumerate(conj_events):
        bound = mt_bound(c, mu, events, sizes)
        out[str(conjunctions[i])] = judge([r[i] for r in runs], bound, binary=True)
    return out


CHECKS = ("swap-marginals", "symmetries", "prop51", "witness-tree", "expectation", "mt-distribution")


def run_check(name: str, trials: int | None = None) -> tuple[bool, dict]:
    """Run one named check; returns ``(passed, details)``."""
    if name == "swap-marginals":
        rep = check_swap_marginals()
        return rep.passed, rep.to_json()
    if name == "symmetries":
        rep = check_symmetries()
        return rep.passed, rep.to_json()
    if name == "prop51":
        rep = check_prop51()
        return rep.passed, rep.to_json()
    if name == "witness-tree":
        res = witness_tree_experiment(trials or 100_000)
    elif name == "expectation":
        res = expectation_experiment(trials or 10_000)
        res.pop("criterion_satisfied")
    elif name == "mt-distribution":
        res = distribution_experiment(trials or 100_000)
    else:
        raise ValueError(f"unknown check {name!r}; choose from {CHECKS}")
    return all(r.passed for r in res.values()), {k: r.to_json() for k, r in res.items()}
