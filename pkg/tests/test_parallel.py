import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlll.apps import ColorMatrix, LatinOracle
from permlll.engine import Instance, replay
from permlll.events import BadEvent, ExplicitList, depends, is_true
from permlll.parallel import (
    ConflictGraph,
    ParallelConfig,
    greedy_mis,
    lfmis,
    lfmis_reference,
    peel_lfmis,
    run_parallel,
)
from permlll.rng import Rng


@pytest.mark.parametrize("mode", ["standard", "lopsided"])
def test_greedy_mis_examples(mode):
    independent = [BadEvent(i, [(0, i, i)]) for i in range(4)]
    assert sorted(e.id for e in greedy_mis(independent, mode, Rng(1))) == [0, 1, 2, 3]
    clique = [BadEvent(i, [(0, 0, i)]) for i in range(4)]
    assert len(greedy_mis(clique, mode, Rng(1))) == 1
    a, b, c = BadEvent(0, [(0, 0, 0)]), BadEvent(1, [(0, 0, 1), (0, 2, 2)]), BadEvent(2, [(0, 2, 3)])
    for seed in range(20):
        got = {e.id for e in greedy_mis([a, b, c], mode, Rng(seed))}
        assert got in ({0, 2}, {1})


@settings(max_examples=80)
@given(
    st.lists(st.lists(st.tuples(st.just(0), st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=2), max_size=10),
    st.integers(0, 2**32),
    st.sampled_from(["standard", "lopsided"]),
)
def test_greedy_mis_is_maximal_independent(lists, seed, mode):
    events = []
    for t in lists:
        try:
            events.append(BadEvent(len(events), t))
        except ValueError:
            pass
    chosen = greedy_mis(events, mode, Rng(seed))
    ids = {e.id for e in chosen}
    for i, a in enumerate(chosen):
        for b in chosen[i + 1 :]:
            assert not depends(a, b, mode)
    for e in events:
        if e.id not in ids:
            assert any(depends(e, c, mode) for c in chosen)


def test_lfmis_examples():
    assert lfmis(ConflictGraph(3), [0, 1, 2]) == {0, 1, 2}
    path = ConflictGraph(3, [(0, 1), (1, 2)])
    assert lfmis(path, [0, 1, 2]) == {0, 2}
    star = ConflictGraph(4, [(0, 1), (0, 2), (0, 3)])
    assert lfmis(star, [0, 1, 2, 3]) == {0}
    assert peel_lfmis(path) == ({0, 2}, 2)


def test_lfmis_rejects_cycle_and_misoriented_edges():
    with pytest.raises(RuntimeError):
        peel_lfmis(ConflictGraph(2, [(0, 1), (1, 0)]))
    with pytest.raises(RuntimeError):
        lfmis(ConflictGraph(2, [(1, 0)]), [0, 1])


def random_dag(rng: Rng, size: int, density: float) -> tuple[ConflictGraph, list[int]]:
    order = list(range(size))
    rng.shuffle(order)
    rank = [0] * size
    for pos, v in enumerate(order):
        rank[v] = pos
    g = ConflictGraph(size)
    for a in range(size):
        for b in range(size):
            if rank[a] < rank[b] and rng.random() < density:
                g.add_edge(a, b)
    return g, rank


@given(st.integers(0, 2**32), st.integers(0, 30), st.floats(0.0, 1.0))
def test_peel_matches_definitional_lfmis(seed, size, density):
    g, rank = random_dag(Rng(seed), size, density)
    assert lfmis(g, rank) == lfmis_reference(g, rank)


def test_parallel_without_true_events():
    inst = Instance([4], ExplicitList([], [4]))
    out = run_parallel(inst, ParallelConfig(seed=0))
    assert out.success and out.parallel.rounds == 0 and out.log == []


def test_parallel_round_cap():
    events = [BadEvent(0, [(0, 0, 0)]), BadEvent(1, [(0, 0, 1)])]
    out = run_parallel(Instance([2], ExplicitList(events, [2])), ParallelConfig(max_rounds=3))
    assert out.status == "iteration-limit" and out.parallel.rounds == 3


@pytest.mark.parametrize("mode", ["standard", "lopsided"])
def test_parallel_latin_serializes(mode):
    matrix = ColorMatrix.with_multiplicity(40, 4, 2)
    inst = Instance([40], LatinOracle(matrix))
    for seed in range(10):
        out = run_parallel(inst, ParallelConfig(seed=seed, mode=mode))
        assert out.success
        assert not inst.oracle.all_true(out.perms)
        assert replay(out.initial, out.log) == out.perms


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=2), min_size=1, max_size=6),
    st.integers(0, 2**32),
)
def test_parallel_replay_matches_on_random_instances(lists, seed):
    events = []
    for t in lists:
        try:
            events.append(BadEvent(len(events), t))
        except ValueError:
            pass
    inst = Instance([5, 5], ExplicitList(events, [5, 5]))
    out = run_parallel(inst, ParallelConfig(seed=seed, max_rounds=40))
    assert replay(out.initial, out.log) == out.perms
    if out.success:
        assert not any(is_true(e, out.perms) for e in events)
