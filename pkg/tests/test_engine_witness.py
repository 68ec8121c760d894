import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlll.apps import ColorMatrix, LatinOracle
from permlll.engine import (
    ITERATION_LIMIT,
    SUCCESS,
    EngineConfig,
    Instance,
    format_log,
    parse_log,
    replay,
    run,
)
from permlll.events import BadEvent, ExplicitList, is_true
from permlll.perm import Permutation
from permlll.witness import build_witness_tree, mt_bound, project_witness_subdag


def explicit(sizes, triples_lists):
    events = [BadEvent(i, t) for i, t in enumerate(triples_lists)]
    return Instance(sizes, ExplicitList(events, sizes)), events


def small_instances():
    """Random two-permutation instances of 1-2 triple events."""
    triple = st.tuples(st.integers(0, 1), st.integers(0, 3), st.integers(0, 3))
    return st.lists(st.lists(triple, min_size=1, max_size=2), min_size=1, max_size=5)


def _valid(lists):
    out = []
    for t in lists:
        try:
            BadEvent(0, t)
            out.append(t)
        except ValueError:
            pass
    return out


# --- engine ------------------------------------------------------------------


def test_no_events_succeeds_immediately():
    inst, _ = explicit([5], [])
    out = run(inst, EngineConfig(seed=3))
    assert out.success and out.stats.resamples == 0 and out.log == []


def test_forced_output():
    inst, _ = explicit([2], [[(0, 0, 0)]])
    for seed in range(10):
        out = run(inst, EngineConfig(seed=seed))
        assert out.status == SUCCESS and out.perms[0].forward == [1, 0]


def test_iteration_limit_when_impossible():
    inst, _ = explicit([2], [[(0, 0, 0)], [(0, 0, 1)]])
    out = run(inst, EngineConfig(max_resamplings=50))
    assert out.status == ITERATION_LIMIT and out.stats.resamples == 50


def test_config_validation():
    with pytest.raises(ValueError):
        EngineConfig(max_resamplings=0)
    with pytest.raises(ValueError):
        EngineConfig(selection="best")
    with pytest.raises(ValueError):
        EngineConfig(selection="priority")


@pytest.mark.parametrize("selection", ["first", "random"])
def test_same_seed_same_run(selection):
    inst = Instance([30], LatinOracle(ColorMatrix.with_multiplicity(30, 3, 1)))
    a = run(inst, EngineConfig(seed=5, selection=selection))
    b = run(inst, EngineConfig(seed=5, selection=selection))
    assert a.perms == b.perms and format_log(a.log) == format_log(b.log)


def test_priority_selection_uses_key():
    inst, events = explicit([4], [[(0, 0, 0)], [(0, 1, 1)], [(0, 2, 2)]])
    out = run(inst, EngineConfig(seed=1, selection="priority", priority=lambda e: -e.id))
    assert out.success
    assert not any(is_true(e, out.perms) for e in events)


@settings(max_examples=60, deadline=None)
@given(small_instances(), st.integers(0, 2**32), st.sampled_from(["first", "random"]))
def test_success_means_no_true_event_and_log_replays(lists, seed, selection):
    lists = _valid(lists)
    inst, events = explicit([4, 4], lists)
    out = run(inst, EngineConfig(seed=seed, selection=selection, max_resamplings=2000), keep_initial=True)
    if out.success:
        assert not any(is_true(e, out.perms) for e in events)
    assert replay(out.initial, out.log, inst.oracle) == out.perms
    by_id = {e.id: e for e in events}
    assert replay(out.initial, parse_log(format_log(out.log), by_id), inst.oracle) == out.perms
    assert out.stats.resamples == len(out.log) == sum(out.stats.per_event.values())


def test_replay_rejects_false_event():
    inst, events = explicit([3], [[(0, 0, 0)]])
    out = run(inst, EngineConfig(seed=0), keep_initial=True)
    wrong = [Permutation([1, 2, 0])]
    if out.log:
        with pytest.raises(ValueError):
            replay(wrong, out.log, inst.oracle)


def test_log_format_is_one_based():
    inst, _ = explicit([2], [[(0, 0, 0)]])
    for seed in range(20):
        out = run(inst, EngineConfig(seed=seed))
        if out.log:
            line = format_log(out.log).splitlines()[0].split()
            assert line[:5] == ["1", "1", "1", "1", "1"]
            assert line[5] in {"1", "2"}
            return
    pytest.fail("no seed needed a resampling")


# --- witness trees --------------------------------------------------------------


def test_tree_examples():
    b1, b2 = BadEvent(1, [(0, 0, 0)]), BadEvent(2, [(0, 0, 1)])
    tree = build_witness_tree([b1, b2], 2)
    assert tree.key() == (2, ((1, ()),))
    c = BadEvent(3, [(0, 2, 2)])
    assert build_witness_tree([b1, c], 2).key() == (3, ())
    path = build_witness_tree([b1, b1, b1], 3)
    assert path.key() == (1, ((1, ((1, ()),)),)) and path.height() == 2
    with pytest.raises(ValueError):
        build_witness_tree([b1], 2)


def test_tree_tie_goes_to_earliest_added_node():
    root = BadEvent(0, [(0, 0, 0), (0, 1, 1)])
    a, b = BadEvent(1, [(0, 0, 2)]), BadEvent(2, [(0, 1, 3)])
    both = BadEvent(3, [(0, 0, 3), (0, 5, 2)])
    tree = build_witness_tree([both, b, a, root], 4)
    # a and b hang off the root; `both` depends on a and b (depth 1) and takes a, added first
    assert tree.nodes[1].event.id == 1
    assert tree.nodes[3].parent == 1


@settings(max_examples=60, deadline=None)
@given(small_instances(), st.integers(0, 2**32), st.sampled_from(["standard", "lopsided"]))
def test_witness_tree_structure_on_real_logs(lists, seed, mode):
    lists = _valid(lists)
    inst, _ = explicit([4, 4], lists)
    out = run(inst, EngineConfig(seed=seed, max_resamplings=60))
    for t in range(1, len(out.log) + 1):
        tree = build_witness_tree(out.log, t, mode)
        tree.check()
        for k in (0, 1):
            project_witness_subdag(tree, k).check()


def test_subdag_examples():
    root, child = BadEvent(0, [(0, 0, 1)]), BadEvent(1, [(0, 0, 2)])
    tree = build_witness_tree([child, root], 2)
    dag = project_witness_subdag(tree, 0)
    assert dag.labels() == [(1, 2), (1, 3)]
    assert dag.edges == {(1, 0)}
    single = project_witness_subdag(build_witness_tree([root], 1), 0)
    assert len(single.nodes) == 1 and not single.edges
    pair = project_witness_subdag(build_witness_tree([BadEvent(0, [(0, 0, 1), (0, 2, 3)])], 1), 0)
    assert len(pair.nodes) == 2 and not pair.edges and not pair.comparable(0, 1)


def test_mt_bound_examples():
    assert mt_bound([(0, 0, 0)], {}, [], [4]) == pytest.approx(0.25)
    dep = BadEvent(0, [(0, 0, 1)])
    assert mt_bound([(0, 0, 0)], {0: 1.0}, [dep], [4]) == pytest.approx(0.5)
    same = BadEvent(0, [(0, 0, 0)])
    assert mt_bound([(0, 0, 0)], {0: 1.0}, [same], [2]) == pytest.approx(1.0)
