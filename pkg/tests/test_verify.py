from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlll.verify import (
    ExactDistribution,
    _exhaustive_prop51,
    boundary_weights,
    check_swap_marginals,
    enumerate_branches,
    enumerate_swap,
    enumerate_swap_range,
    g_bound,
    implementation_swap_distribution,
    implementation_swap_range_distribution,
    judge,
    leading_matches,
    monte_carlo_bound,
    run_check,
    small_trees,
    tiny_instance,
)


def test_enumerate_swap_examples():
    assert enumerate_swap([0, 1, 2], []).probs == {(0, 1, 2): 1}
    assert enumerate_swap([0, 1], [0]).probs == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}
    dist = enumerate_swap([0, 1, 2], [0, 1, 2])
    assert dist.probs == {p: Fraction(1, 6) for p in permutations(range(3))}
    assert dist.total() == 1
    with pytest.raises(ValueError):
        enumerate_swap(list(range(9)), [0])


def test_enumerate_branches_counts_weights():
    dist = enumerate_branches(lambda rng: (rng.below(2), rng.below(3) if rng.below(2) else None))
    assert dist.total() == 1
    assert dist[(0, None)] == Fraction(1, 4)
    assert dist[(1, 2)] == Fraction(1, 12)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda n: st.tuples(st.permutations(range(n)), st.lists(st.integers(0, n - 1), unique=True, max_size=min(n, 3)))
    )
)
def test_implementation_matches_independent_enumeration(args):
    forward, xs = args
    assert implementation_swap_distribution(forward, xs) == enumerate_swap(forward, xs)
    assert implementation_swap_range_distribution(forward, xs) == enumerate_swap_range(forward, xs)


def test_exact_distribution_helpers():
    d = ExactDistribution({"a": Fraction(1, 3), "b": Fraction(2, 3), "c": 0})
    assert "c" not in d.probs
    assert d.map(lambda k: 1).probs == {1: 1}
    assert d.prob(lambda k: k == "b") == Fraction(2, 3)


def test_swap_marginal_check_passes():
    rep = check_swap_marginals()
    assert rep.passed and rep.cases > 0


def test_g_bound_examples():
    assert g_bound(3, 1, 1, 1) == Fraction(1, 3)
    assert g_bound(3, 1, 0, 1) == Fraction(2, 3)
    assert all(g_bound(n, 0, 0, q) == 1 for n in range(1, 6) for q in range(n + 1))
    with pytest.raises(ValueError):
        g_bound(3, 2, 0, 2)
    with pytest.raises(ValueError):
        g_bound(3, 1, 2, 2)


def test_leading_matches():
    assert leading_matches([0, 1], [5, 6], [(0, 9), (9, 6), (1, 1)]) == 2
    assert leading_matches([0, 1], [5, 6], [(9, 9), (1, 6)]) == 0


def test_prop51_examples():
    # n=3, r=1, q=1, s=1 is tight
    dist = enumerate_swap([0, 1, 2], [0])
    assert dist.prob(lambda f: f[0] == 0) == g_bound(3, 1, 1, 1)
    # q=0: probability 1
    assert dist.total() == g_bound(3, 1, 0, 0)
    # n=4, r=2, s=0, q=2 with constraints away from the swapped points
    d4 = enumerate_swap([0, 1, 2, 3], [0, 1])
    p = d4.prob(lambda f: f[2] == 3 and f[3] == 2)
    assert p <= g_bound(4, 2, 0, 2)


def _naive_prop51(n):
    """(configurations, max prob/g) over every configuration at the largest admissible s."""
    worst = Fraction(0)
    count = 0
    for pi in permutations(range(n)):
        for r in range(n + 1):
            for xs in permutations(range(n), r):
                dist = enumerate_swap(pi, xs)
                ys = [pi[x] for x in xs]
                for q in range(n + 1):
                    for xp in permutations(range(n), q):
                        for yp in permutations(range(n), q):
                            cons = list(zip(xp, yp))
                            s = min(leading_matches(xs, ys, cons), q, r)
                            if q + r - s > n:
                                continue
                            count += 1
                            p = dist.prob(lambda f: all(f[a] == b for a, b in cons))
                            worst = max(worst, p / g_bound(n, r, s, q))
    return count, worst


def test_prop51_exhaustive_agrees_with_naive_loop_and_is_tight():
    count, worst = _naive_prop51(3)
    # the bound is attained, so any smaller bound would be refuted
    assert worst == 1
    checked, bad = _exhaustive_prop51(3, 3)
    assert bad is None and checked == count


def test_judge_and_harness_examples():
    assert monte_carlo_bound(lambda s: 0, lambda x: x, 0.0, 10_000).passed
    coin = monte_carlo_bound(lambda s: s % 2, lambda x: x, 0.5, 10_000)
    assert coin.passed and abs(coin.z) <= 4
    assert not monte_carlo_bound(lambda s: s % 2, lambda x: x, 0.4, 10_000).passed
    r = judge([1.0, 2.0, 3.0], 1.0, binary=False)
    assert r.passed and r.estimate == 2.0 and r.z == pytest.approx(3**0.5)
    assert not judge([1.0, 2.0, 3.0], -1.0, binary=False).passed
    assert not judge([1.0] * 10, 0.5, binary=True).passed


def test_tiny_instance_has_boundary_weights():
    sizes, events = tiny_instance()
    mu = boundary_weights()
    assert mu == pytest.approx({0: 0.43163, 1: 0.43163, 2: 0.20598}, abs=1e-5)
    trees = small_trees(events)
    assert len(trees) == 3 + 7


def test_run_check_rejects_unknown_name():
    with pytest.raises(ValueError):
        run_check("nope")
