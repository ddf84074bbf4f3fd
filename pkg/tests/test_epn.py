import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import community_on, path_network
from epnrecovery.epn import (
    Component,
    build_network,
    component_importance,
    energized_load_points,
    energized_nodes,
)
from epnrecovery.errors import ModelDefinitionError
from epnrecovery.fragility import DamageScenario
from oracles import nx_energized, path_energized


def test_path_with_failed_middle_edge():
    net = path_network(5)
    assert net.nodes == ("s", "a", "b", "c", "d")
    assert energized_load_points(net, {"Ebc": False}) == {"a", "b"}
    assert energized_load_points(net, {}) == {"a", "b", "c", "d"}


def test_failed_source():
    net = path_network(5, guard="node")
    assert energized_load_points(net, {"Ns": False}) == set()
    assert energized_nodes(net, {"Ns": False}) == set()


def test_failed_node_blocks_through_traffic():
    net = path_network(5, guard="node")
    assert energized_load_points(net, {"Nb": False}) == {"a"}


def test_vector_form_matches_mapping():
    net = path_network(5)
    vec = np.array([cid != "Ebc" for cid in net.component_ids])
    assert energized_load_points(net, vec) == energized_load_points(net, {"Ebc": False})
    with pytest.raises(ModelDefinitionError):
        energized_load_points(net, vec[:2])


def test_bundled_fully_energized(gilroy):
    net = gilroy.network
    assert energized_load_points(net, {c.id: True for c in net.components}) == set(net.load_points)
    assert energized_load_points(net, {"SUB-LLAGAS": False}) == set()


def test_unguarded_elements_always_conduct():
    comps = [Component("X", "line_segment", ("edge", ("s", "a")), (0, 0))]
    net = build_network(["s", "a", "b"], [("s", "a"), ("a", "b")], ["s"], comps, {"b": "cell"})
    assert energized_load_points(net, {"X": True}) == {"b"}
    assert energized_load_points(net, {"X": False}) == set()


@pytest.mark.parametrize("make", [
    lambda: build_network(["s", "s"], [], ["s"], []),
    lambda: build_network(["s"], [], ["t"], []),
    lambda: build_network(["s", "a"], [("s", "b")], ["s"], []),
    lambda: build_network(["s", "a"], [("s", "a"), ("a", "s")], ["s"], []),
    lambda: build_network(["s", "a"], [("s", "a")], ["s"], [
        Component("A", "line_segment", ("edge", ("s", "a")), (0, 0)),
        Component("B", "line_segment", ("edge", ("a", "s")), (0, 0))]),
    lambda: build_network(["s"], [], ["s"], [Component("A", "substation", ("node", "q"), (0, 0))]),
    lambda: build_network(["s"], [], ["s"], [], {"q": "cell"}),
])
def test_invalid_networks(make):
    with pytest.raises(ModelDefinitionError):
        make()


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 8))
    names = [f"n{i}" for i in range(n)]
    pairs = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=12)) if pairs else []
    sources = draw(st.lists(st.sampled_from(names), min_size=1, max_size=2, unique=True))
    comps = []
    for x in names:
        if draw(st.booleans()):
            comps.append(Component(f"N{x}", "distribution_node", ("node", x), (0, 0)))
    for u, v in edges:
        if draw(st.booleans()):
            comps.append(Component(f"E{u}{v}", "line_segment", ("edge", (u, v)), (0, 0)))
    net = build_network(names, edges, sources, comps, {x: "cell" for x in names})
    up = {c.id for c in comps if draw(st.booleans())}
    return net, up


@settings(max_examples=400, deadline=None)
@given(small_graphs())
def test_matches_path_enumeration(case):
    net, up = case
    functional = {c.id: c.id in up for c in net.components}
    got = energized_load_points(net, functional)
    assert got == path_energized(net, up) & set(net.load_points)
    assert got == nx_energized(net, up) & set(net.load_points)


@settings(max_examples=200, deadline=None)
@given(small_graphs(), st.randoms(use_true_random=False))
def test_repairs_never_shrink_energized_set(case, rnd):
    net, _ = case
    ids = list(net.component_ids)
    rnd.shuffle(ids)
    up, prev = set(), energized_load_points(net, {c: False for c in ids})
    for cid in ids:
        up.add(cid)
        cur = energized_load_points(net, {c: c in up for c in ids})
        assert prev <= cur
        prev = cur


def _path_problem(pops, damaged):
    net = path_network(len(pops) + 1)
    com = community_on(list(net.nodes[1:]), pops)
    ids = net.component_ids
    sc = DamageScenario.from_durations(ids, [1.0 if c in damaged else 0.0 for c in ids])
    return net, com, sc


def test_importance_singleton():
    net, com, sc = _path_problem([100, 200, 300, 400], {"Ebc"})
    assert component_importance(net, com, sc) == [("Ebc", 700.0)]


def test_importance_prefers_large_cell():
    # star: s feeds a (10,000 people) and b (500 people) through separate lines
    comps = [Component("L1", "line_segment", ("edge", ("s", "a")), (0, 0)),
             Component("L2", "line_segment", ("edge", ("s", "b")), (0, 0))]
    net = build_network(["s", "a", "b"], [("s", "a"), ("s", "b")], ["s"], comps, {"a": "cell", "b": "cell"})
    com = community_on(["a", "b"], [10_000, 500])
    sc = DamageScenario.from_durations(["L1", "L2"], [3.0, 3.0])
    assert component_importance(net, com, sc) == [("L1", 10_000.0), ("L2", 500.0)]


def test_importance_all_blocked_ties_by_id():
    net, com, sc = _path_problem([100, 200, 300, 400], {"Esa", "Eab", "Ebc"})
    assert component_importance(net, com, sc) == [("Esa", 100.0), ("Eab", 0.0), ("Ebc", 0.0)]
    blocked = _path_problem([100, 200, 300, 400], {"Eab", "Ebc"})
    r = component_importance(*blocked)
    assert r == [("Eab", 200.0), ("Ebc", 0.0)]


def test_importance_ignores_retailers():
    net, _, sc = _path_problem([100, 200], {"Eab"})
    com = community_on(["a", "b"], [100, 200], retailers=[("a", 1.0)])
    assert component_importance(net, com, sc) == [("Eab", 200.0)]


def test_importance_counts_downstream_cells():
    net, com, sc = _path_problem([100, 200, 300], {"Esa", "Ebc"})
    assert component_importance(net, com, sc) == [("Esa", 100.0 + 200.0), ("Ebc", 0.0)]
    net, com, sc = _path_problem([100, 200, 300], {"Esa", "Eab"})
    assert component_importance(net, com, sc) == [("Esa", 100.0), ("Eab", 0.0)]


@settings(max_examples=200, deadline=None)
@given(small_graphs(), st.lists(st.integers(0, 5000), min_size=8, max_size=8))
def test_importance_bounds_and_order(case, pops):
    net, up = case
    names = list(net.nodes)
    if sum(pops[:len(names)]) == 0:
        return
    com = community_on(names, pops[:len(names)])
    ids = net.component_ids
    if len(up) == len(ids):
        return
    sc = DamageScenario.from_durations(ids, [0.0 if c in up else 1.0 for c in ids])
    ranking = component_importance(net, com, sc)
    scores = [s for _, s in ranking]
    assert all(0 <= s <= com.total_population for s in scores)
    assert ranking == sorted(ranking, key=lambda r: (-r[1], r[0]))
    base = {x for x in nx_energized(net, up)}
    for cid, s in ranking:
        gain = nx_energized(net, up | {cid}) - base
        assert s == sum(p for x, p in zip(names, pops) if x in gain)
