import math
import random
from functools import reduce

import pytest
from hypothesis import given, strategies as st

from conftest import random_connected
from vcut.graph import GenSpec, Graph, bfs_distances, components, cycle_graph, generate, path_graph, remove_vertices, stats
from vcut.primitives import BfsLabel, broadcast, bfs_tree, component_label, converge_aggregate, leader_election
from vcut.sim import SimConfig
from vcut.wire import WidthError, id_width


def election_bound(d: int) -> int:
    # regression baseline: 8 D + O(log D)
    return 8 * d + 2 * math.ceil(math.log2(d + 1)) + 4


@st.composite
def small_graphs(draw, lo=1, hi=40):
    n = draw(st.integers(lo, hi))
    return random_connected(random.Random(draw(st.integers(0, 2**32))), n, draw(st.floats(0, 0.3)))


def check_bfs(g: Graph, root: int, res) -> None:
    dist = bfs_distances(g, root)
    for v, lab in enumerate(res.outputs):
        assert lab.root == root and lab.depth == dist[v]
        if v == root:
            assert lab.parent == root
        else:
            assert g.has_edge(v, lab.parent) and dist[lab.parent] == dist[v] - 1


def test_bfs_path_and_cycle():
    assert [x.depth for x in bfs_tree(path_graph(5), 0).outputs] == [0, 1, 2, 3, 4]
    assert [x.depth for x in bfs_tree(cycle_graph(6), 0).outputs] == [0, 1, 2, 3, 2, 1]


def test_bfs_planted():
    g = generate(GenSpec("planted_separator", a=20, k=3, b=25, seed=4))
    check_bfs(g, 7, bfs_tree(g, 7))


@given(small_graphs(), st.integers(0, 2**16))
def test_bfs_matches_sequential(g, r):
    root = r % g.n
    check_bfs(g, root, bfs_tree(g, root))


def test_leader_examples():
    # n = 27 keeps the shifted IDs 5..31 inside the 5-bit ID field
    g = generate(GenSpec("gnp", n=27, p=0.2, connected=True, seed=2))
    assert set(leader_election(g).outputs) == {0}
    assert set(leader_election(g, ids=[v + 5 for v in range(g.n)]).outputs) == {5}


def test_leader_c6_round_bound():
    res = leader_election(cycle_graph(6))
    assert res.metrics.rounds_used <= election_bound(3)


@given(small_graphs(lo=2), st.integers(0, 2**32))
def test_leader_agreement_and_bound(g, seed):
    rng = random.Random(seed)
    ids = rng.sample(range(1 << id_width(g.n)), g.n)
    res = leader_election(g, SimConfig(global_seed=seed), ids=ids)
    assert set(res.outputs) == {min(ids)}
    assert res.metrics.rounds_used <= election_bound(stats(g).diameter)


AGG = {"min": min, "max": max, "sum": lambda a, b: a + b}


@given(small_graphs(), st.sampled_from(["min", "max", "sum"]), st.integers(0, 2**32))
def test_aggregate_matches_fold(g, op, seed):
    rng = random.Random(seed)
    # O(log n)-bit values so a report fits one message
    w = id_width(g.n)
    width = 2 * w if op != "sum" else 3 * w
    inputs = {v: rng.randrange(1 << 2 * w) for v in range(g.n)}
    res = converge_aggregate(g, op, inputs, width)
    assert set(res.outputs) == {reduce(AGG[op], inputs.values())}


def test_aggregate_examples():
    g = cycle_graph(6)
    assert set(converge_aggregate(g, "count", {}, 4).outputs) == {6}
    assert set(converge_aggregate(g, "sum", {v: 1 for v in range(6)}, 4).outputs) == {6}
    vals = [7, 3, 9, 5, 8, 6]
    assert set(converge_aggregate(g, "min", dict(enumerate(vals)), 4).outputs) == {3}


def test_aggregate_errors():
    with pytest.raises(ValueError):
        converge_aggregate(cycle_graph(4), "median", {}, 4)
    with pytest.raises(WidthError):
        converge_aggregate(cycle_graph(4), "max", {0: 99}, 4)


def test_broadcast_example():
    assert set(broadcast(generate(GenSpec("tree", n=40, seed=1)), 13, 3, 4).outputs) == {3}


def expected_labels(g: Graph, excluded) -> list:
    h, kept = remove_vertices(g, excluded)
    out = [None] * g.n
    for comp in components(h):
        label = min(kept[i] for i in comp)
        for i in comp:
            out[kept[i]] = label
    return out


def test_component_examples():
    star = Graph(5, [(0, i) for i in range(1, 5)])
    assert component_label(star, {0}).outputs == (None, 1, 2, 3, 4)
    out = component_label(cycle_graph(6), {0}).outputs
    assert out[0] is None and set(out[1:]) == {1}
    assert component_label(cycle_graph(6), {0, 3}).outputs == (None, 1, 1, None, 4, 4)


@given(small_graphs(lo=3), st.integers(0, 2**32))
def test_component_label_partition(g, seed):
    rng = random.Random(seed)
    ex = set(rng.sample(range(g.n), rng.randint(1, min(4, g.n - 1))))
    assert list(component_label(g, ex).outputs) == expected_labels(g, ex)


def test_bfs_label_type():
    lab = bfs_tree(path_graph(3), 1).outputs[1]
    assert lab == BfsLabel(1, 1, 0)
