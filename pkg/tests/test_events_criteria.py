import math
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permlll.criteria import (
    check_asymmetric,
    check_packing,
    check_symmetric,
    check_szabo,
    conjugate_criterion,
    fixed_point_weights,
    latin_alpha,
    max_szabo_delta,
    mu_from_x,
    solve_alpha,
    strong_coloring_alpha,
    szabo_lhs,
)
from permlll.events import (
    BadEvent,
    EventIndex,
    ExplicitList,
    FormatError,
    depends,
    format_event_list,
    is_true,
    neighborhood,
    parse_event_list,
    prob_omega,
)
from permlll.perm import Permutation, random_permutation, swap
from permlll.rng import Rng

# --- events ------------------------------------------------------------------


def test_event_rejects_impossible_and_empty():
    with pytest.raises(ValueError):
        BadEvent(0, [])
    with pytest.raises(ValueError):
        BadEvent(0, [(0, 1, 2), (0, 1, 3)])
    with pytest.raises(ValueError):
        BadEvent(0, [(0, 1, 2), (0, 3, 2)])


def test_prob_omega_examples():
    assert prob_omega(BadEvent(0, [(0, 1, 1)]), [5]) == Fraction(1, 5)
    assert prob_omega(BadEvent(0, [(0, 0, 0), (0, 1, 1)]), [4]) == Fraction(1, 12)
    assert prob_omega(BadEvent(0, [(0, 0, 0), (1, 0, 0)]), [3, 3]) == Fraction(1, 9)


def test_prob_omega_matches_enumeration():
    e = BadEvent(0, [(0, 0, 2), (0, 3, 1)])
    hits = sum(1 for p in permutations(range(4)) if p[0] == 2 and p[3] == 1)
    assert prob_omega(e, [4]) == Fraction(hits, 24)


def test_dependency_examples():
    a, b = BadEvent(0, [(0, 1, 2)]), BadEvent(1, [(0, 1, 3)])
    assert depends(a, b, "standard") and depends(a, b, "lopsided")
    c = BadEvent(2, [(0, 3, 4)])
    assert not depends(a, c, "standard") and not depends(a, c, "lopsided")
    d = BadEvent(3, [(0, 1, 2)])
    assert depends(a, d, "standard")
    assert not depends(a, d, "lopsided")
    assert depends(a, a, "lopsided")
    e = BadEvent(4, [(1, 1, 2)])
    assert not depends(a, e, "standard")


def test_is_true_examples():
    ident = [Permutation.identity(3), Permutation.identity(3)]
    assert is_true(BadEvent(0, [(0, 1, 1)]), ident)
    assert not is_true(BadEvent(0, [(0, 1, 2)]), ident)
    assert is_true(BadEvent(0, [(0, 1, 1), (1, 2, 2)]), ident)


def test_neighborhood_examples():
    b = BadEvent(0, [(0, 0, 0)])
    assert neighborhood(b, [b]) == [b]
    c = BadEvent(1, [(0, 1, 1)])
    assert neighborhood(b, [b, c]) == [b]
    assert neighborhood(c, [b, c]) == [c]


def random_events(draw_n=4, count=6):
    return st.integers(2, draw_n).flatmap(
        lambda n: st.lists(
            st.lists(st.tuples(st.just(0), st.integers(0, n - 1), st.integers(0, n - 1)), min_size=1, max_size=3),
            min_size=1,
            max_size=count,
        ).map(lambda lists: (n, lists))
    )


def _build(lists):
    out = []
    for triples in lists:
        try:
            out.append(BadEvent(len(out), triples))
        except ValueError:
            pass
    return out


@given(random_events(), st.sampled_from(["standard", "lopsided"]))
def test_index_neighborhood_matches_pairwise_definition(args, mode):
    _, lists = args
    events = _build(lists)
    index = EventIndex(events)
    for e in events:
        brute = sorted((b for b in events if depends(e, b, mode)), key=lambda b: b.id)
        assert sorted(index.neighborhood(e, mode), key=lambda b: b.id) == brute


@given(random_events(), st.integers(0, 2**64 - 1))
def test_explicit_tracker_matches_scan(args, seed):
    n, lists = args
    events = _build(lists)
    oracle = ExplicitList(events, [n])
    rng = Rng(seed)
    perms = [random_permutation(n, rng)]
    tracker = oracle.tracker(perms)
    for _ in range(5):
        brute = [e for e in events if is_true(e, perms)]
        assert tracker.true_events() == brute
        assert oracle.all_true(perms) == brute
        assert tracker.first_true() == (brute[0] if brute else None)
        xs = rng.sample(range(n), rng.below(n) + 1)
        mates = swap(perms[0], xs, rng)
        tracker.touched(0, (*xs, *mates))


def test_event_list_round_trip():
    text = "# sizes\nperms 2 3 4\nevent 1 1 1 2\nevent 2 1 2 3 2 4 4\n"
    sizes, events = parse_event_list(text)
    assert sizes == [3, 4]
    assert [e.triples for e in events] == [((0, 0, 1),), ((0, 1, 2), (1, 3, 3))]
    assert parse_event_list(format_event_list(sizes, events)) == (sizes, events)


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("perm 1 3\n", 1),
        ("perms 2 3\n", 1),
        ("perms 1 3\nevent 1 1 1\n", 2),
        ("perms 1 3\n\nevent 1 1 4 1\n", 3),
        ("perms 1 3\nevent 1 2 1 1\n", 2),
        ("perms 1 3\nevent 2 1 1 1 1 1 2\n", 2),
    ],
)
def test_event_list_errors_carry_line(text, line):
    with pytest.raises(FormatError) as info:
        parse_event_list(text)
    assert info.value.line == line


# --- criteria ----------------------------------------------------------------


def test_asymmetric_examples():
    b = BadEvent(0, [(0, 0, 0)])
    rep = check_asymmetric([b], [2], {0: 1.0})
    assert rep.satisfied and rep.slack[0] == pytest.approx(0.0)
    assert rep.epsilon == pytest.approx(0.0)
    assert not check_asymmetric([b], [2], {0: 0.5}).satisfied
    e1, e2 = BadEvent(0, [(0, 0, 0)]), BadEvent(1, [(1, 0, 0)])
    rep = check_asymmetric([e1, e2], [3, 3], {0: 0.5, 1: 0.5})
    assert rep.satisfied and rep.epsilon == pytest.approx(0.0)


def test_asymmetric_rejects_bad_weights():
    b = BadEvent(0, [(0, 0, 0)])
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            check_asymmetric([b], [2], {0: bad})
    with pytest.raises(ValueError):
        check_asymmetric([b], [2], {})


def test_fixed_point_weights_sit_on_boundary():
    events = [BadEvent(0, [(0, 0, 0)]), BadEvent(1, [(0, 1, 1)]), BadEvent(2, [(0, 0, 1), (0, 2, 2)])]
    mu = fixed_point_weights(events, [4])
    rep = check_asymmetric(events, [4], mu)
    assert rep.satisfied
    assert all(abs(s) < 1e-9 for s in rep.slack.values())
    assert mu[0] == pytest.approx(0.43163, abs=1e-5)
    assert mu[2] == pytest.approx(0.20598, abs=1e-5)


def test_fixed_point_weights_diverge_when_criterion_fails():
    b = BadEvent(0, [(0, 0, 0)])
    assert fixed_point_weights([b], [1]) is None


def test_symmetric_examples():
    assert check_symmetric(1 / (4 * math.e), 3)
    assert not check_symmetric(0.1, 10)
    assert check_symmetric(0.0, 1000)


def test_mu_from_x_examples():
    assert mu_from_x(0) == 0
    assert mu_from_x(0.5) == pytest.approx(1)
    assert mu_from_x(0.75) == pytest.approx(3)
    with pytest.raises(ValueError):
        mu_from_x(1.0)


def test_solve_alpha_examples():
    assert solve_alpha(0.3, 0.0, 4) == 0.3
    # exact boundary of the Latin inequality: Δ = 27n/256 is the last feasible value
    assert latin_alpha(256, 27) is not None
    assert latin_alpha(256, 28) is None
    assert strong_coloring_alpha(29, 3) is not None
    assert strong_coloring_alpha(28, 3) is None


@given(st.floats(1e-6, 0.5), st.floats(0.0, 50.0), st.integers(1, 6))
def test_solve_alpha_root_satisfies_inequality(P, c, m):
    a = solve_alpha(P, c, m)
    if a is not None:
        assert a >= P * (1 + c * a) ** m * (1 - 1e-9)
        assert a >= P


def test_szabo_direct_formula():
    def lhs(n, s, r, d):
        return math.e / math.comb(s, r) * math.factorial(n - r) / math.factorial(n) * (
            2 * r * n * math.comb(d, r - 1) + math.comb(d, r)
        )

    assert szabo_lhs(100, 9, 3, 300) == pytest.approx(lhs(100, 9, 3, 300), rel=1e-12)
    assert check_szabo(100, 9, 3, 300) is (lhs(100, 9, 3, 300) <= 1)
    assert check_szabo(100, 9, 3, 300) is False
    assert check_szabo(50, 4, 1, 0) is (lhs(50, 4, 1, 0) <= 1)
    assert szabo_lhs(30, 3, 3, 2) == pytest.approx(lhs(30, 3, 3, 2), rel=1e-12)
    d = max_szabo_delta(100, 9, 3)
    assert check_szabo(100, 9, 3, d) and not check_szabo(100, 9, 3, d + 1)
    assert d == 293


def test_packing_examples():
    assert check_packing(1, 1, 0, 0, 7, 3)
    assert check_packing(0, 0, 0, 0, 7, 3)
    assert not check_packing(1, 1, 0, 0, 3, 3)


def test_conjugate_ratio_gate():
    rep = conjugate_criterion(300, 8)
    assert rep["ratio_ok"]
    assert not conjugate_criterion(300, 9)["ratio_ok"]
