from collections import Counter
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlll.perm import (
    Permutation,
    apply_transpositions,
    draw_mates,
    random_permutation,
    set_invariant_checks,
    swap,
    swap_range,
    swap_with_mates,
)
from permlll.rng import Rng
from permlll.verify import enumerate_branches


@pytest.fixture(autouse=True)
def strict_invariants():
    set_invariant_checks(True)
    yield
    set_invariant_checks(False)


def perm_and_points(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.permutations(range(n)),
            st.lists(st.integers(0, n - 1), unique=True, max_size=n),
            st.integers(0, 2**64 - 1),
        )
    )


# --- rng ------------------------------------------------------------------


def test_rng_streams_are_reproducible_and_distinct():
    a = [Rng.stream(7, "x").next64() for _ in range(2)]
    assert a[0] == a[1]
    assert Rng.stream(7, "x").next64() != Rng.stream(7, "y").next64()
    assert Rng.stream(7, "x").next64() != Rng.stream(8, "x").next64()


def test_rng_below_is_in_range_and_roughly_uniform():
    rng = Rng(3)
    counts = Counter(rng.below(6) for _ in range(60_000))
    assert set(counts) == set(range(6))
    assert all(abs(c - 10_000) < 500 for c in counts.values())
    with pytest.raises(ValueError):
        rng.below(0)


@given(st.integers(0, 2**64 - 1), st.integers(1, 30))
def test_rng_sample_is_distinct_subset(seed, n):
    rng = Rng(seed)
    r = rng.below(n + 1)
    out = rng.sample(range(n), r)
    assert len(out) == r and len(set(out)) == r and all(0 <= v < n for v in out)


# --- Permutation ------------------------------------------------------------


def test_permutation_rejects_non_bijections():
    with pytest.raises(ValueError):
        Permutation([0, 0])
    with pytest.raises(ValueError):
        Permutation([1, 2])


def test_permutation_one_based_round_trip_and_inverse():
    p = Permutation.from_one_based([3, 1, 2])
    assert p.forward == [2, 0, 1]
    assert p.to_one_based() == [3, 1, 2]
    assert p.inverted().forward == p.inverse
    assert p.compose(p.inverted()) == Permutation.identity(3)
    assert p.cycle_type() == [3]


def test_random_permutation_small_cases():
    assert random_permutation(0, Rng(1)).forward == []
    assert random_permutation(1, Rng(1)).forward == [0]


def test_random_permutation_is_exactly_uniform_on_three():
    dist = enumerate_branches(lambda rng: random_permutation(3, rng).as_tuple())
    assert dist.probs == {p: Fraction(1, 6) for p in permutations(range(3))}


# --- swap ------------------------------------------------------------------


def test_swap_empty_is_identity():
    p = Permutation([2, 0, 1])
    assert swap(p, [], Rng(0)) == []
    assert p.forward == [2, 0, 1]


def test_swap_two_points_exact_distribution():
    dist = enumerate_branches(lambda rng: (swap(p := Permutation.identity(2), [0], rng), p.as_tuple())[1])
    assert dist.probs == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}


def test_swap_all_points_is_uniform():
    def once(rng):
        p = Permutation([1, 2, 0])
        swap(p, [0, 1, 2], rng)
        return p.as_tuple()

    dist = enumerate_branches(once)
    assert dist.probs == {p: Fraction(1, 6) for p in permutations(range(3))}


def test_swap_range_two_points_exact_distribution():
    def once(rng):
        p = Permutation.identity(2)
        swap_range(p, [0], rng)
        return p.as_tuple()

    assert enumerate_branches(once).probs == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}


def test_swap_rejects_bad_points():
    p = Permutation.identity(3)
    with pytest.raises(ValueError):
        swap(p, [0, 0], Rng(0))
    with pytest.raises(ValueError):
        swap(p, [3], Rng(0))
    with pytest.raises(ValueError):
        swap_range(p, [1, 1], Rng(0))


@given(perm_and_points())
def test_swap_keeps_bijection_and_mates_avoid_earlier_points(args):
    forward, xs, seed = args
    p = Permutation(forward)
    mates = swap(p, xs, Rng(seed))
    assert sorted(p.forward) == list(range(len(forward)))
    assert all(p.inverse[p.forward[x]] == x for x in range(len(forward)))
    for i, z in enumerate(mates):
        assert z not in xs[:i]


@given(perm_and_points())
def test_draw_then_apply_equals_swap(args):
    forward, xs, seed = args
    a, b = Permutation(forward), Permutation(forward)
    mates = swap(a, xs, Rng(seed))
    drawn = draw_mates(len(forward), xs, Rng(seed))
    assert drawn == mates
    swap_with_mates(b, xs, drawn)
    assert a == b


def test_swap_with_mates_rejects_forbidden_mate():
    with pytest.raises(ValueError):
        swap_with_mates(Permutation.identity(3), [0, 1], [2, 0])


# --- transpositions ------------------------------------------------------------


def test_apply_transpositions_examples():
    p = Permutation.identity(3)
    apply_transpositions(p, [])
    assert p.forward == [0, 1, 2]
    apply_transpositions(p, [(0, 1), (1, 2)])
    assert p.to_one_based() == [3, 1, 2]
    q = Permutation.identity(3)
    apply_transpositions(q, [(0, 1), (0, 1)])
    assert q == Permutation.identity(3)


def _compose_transposition_product(forward, ts):
    # direct definition: x ↦ π(t_l(...t_1(x)))
    def image(x):
        for a, b in ts:
            x = b if x == a else a if x == b else x
        return forward[x]

    return [image(x) for x in range(len(forward))]


@given(
    st.integers(1, 7).flatmap(
        lambda n: st.tuples(
            st.permutations(range(n)),
            st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8),
        )
    )
)
def test_apply_transpositions_matches_composition(args):
    forward, ts = args
    p = Permutation(forward)
    apply_transpositions(p, ts)
    assert p.forward == _compose_transposition_product(list(forward), ts)


@settings(max_examples=50)
@given(perm_and_points(6))
def test_swap_equals_reversed_transposition_product(args):
    forward, xs, seed = args
    p = Permutation(forward)
    mates = swap(p, xs, Rng(seed))
    q = Permutation(forward)
    apply_transpositions(q, list(zip(xs, mates))[::-1])
    assert p == q
