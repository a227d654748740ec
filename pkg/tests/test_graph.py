import networkx as nx
import pytest
from hypothesis import given, strategies as st

from conftest import to_nx
from vcut.graph import (
    DuplicateEdgeError, EdgeCountError, EndpointRangeError, GenError, GenSpec, Graph, GraphError, HeaderError,
    MalformedEdgeError, SelfLoopError, bfs_distances, clique_graph, components, cycle_graph, emit_edge_list,
    generate, generate_with_cut, is_connected, parse_edge_list, path_graph, petersen_graph, remove_vertices, stats,
)
from vcut.oracle import verify_cut, vertex_connectivity


@st.composite
def graphs(draw, max_n=16):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph(n, edges)


# ---------------------------------------------------------------- edge lists

def test_parse_triangle():
    g = parse_edge_list("3 3\n0 1\n1 2\n0 2")
    assert g == clique_graph(3)


def test_parse_c4():
    assert parse_edge_list("4 4\n0 1\n1 2\n2 3\n3 0") == cycle_graph(4)


def test_parse_rejects_self_loop_at_line_2():
    with pytest.raises(SelfLoopError) as exc:
        parse_edge_list("2 1\n0 0")
    assert exc.value.line == 2


@pytest.mark.parametrize("text,err", [
    ("", HeaderError),
    ("3", HeaderError),
    ("a 1\n0 1", HeaderError),
    ("3 2\n0 1", EdgeCountError),
    ("3 1\n0 1\n1 2", EdgeCountError),
    ("3 1\n0 5", EndpointRangeError),
    ("3 2\n0 1\n0 1", DuplicateEdgeError),
    ("3 1\n0  1", MalformedEdgeError),
    ("3 1\n0 -1", MalformedEdgeError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_edge_list(text)


def test_emit_examples():
    assert emit_edge_list(clique_graph(3)) == "3 3\n0 1\n0 2\n1 2\n"
    assert emit_edge_list(Graph(1)) == "1 0\n"
    assert emit_edge_list(cycle_graph(4)) == "4 4\n0 1\n0 3\n1 2\n2 3\n"


@given(graphs())
def test_round_trip(g):
    assert parse_edge_list(emit_edge_list(g)) == g


def test_reversed_pair_counts_as_duplicate():
    with pytest.raises(DuplicateEdgeError) as exc:
        parse_edge_list("3 2\n0 1\n1 0")
    assert exc.value.line == 3


# ---------------------------------------------------------------- queries

@pytest.mark.parametrize("g,diam,maxdeg", [
    (cycle_graph(6), 3, 2),
    (path_graph(5), 4, 2),
    (clique_graph(4), 1, 3),
])
def test_stats_examples(g, diam, maxdeg):
    s = stats(g)
    assert (s.diameter, s.max_degree, s.is_connected) == (diam, maxdeg, True)


@given(graphs(max_n=40))
def test_diameter_matches_networkx(g):
    s = stats(g)
    h = to_nx(g)
    if g.n == 0:
        return
    assert s.is_connected == nx.is_connected(h)
    if s.is_connected:
        assert s.diameter == (nx.diameter(h) if g.n > 1 else 0)
    assert s.max_degree == max((d for _, d in h.degree), default=0)
    assert s.min_degree == min((d for _, d in h.degree), default=0)


def test_is_connected_examples():
    assert is_connected(cycle_graph(5))
    assert not is_connected(Graph(4, [(0, 1), (2, 3)]))
    assert is_connected(Graph(1))


@given(graphs(max_n=30))
def test_components_match_networkx(g):
    ours = sorted(tuple(c) for c in components(g))
    ref = sorted(tuple(sorted(c)) for c in nx.connected_components(to_nx(g)))
    assert ours == ref


@given(graphs(max_n=30), st.integers(0, 29))
def test_bfs_distances_match_networkx(g, s):
    if g.n == 0:
        return
    s %= g.n
    ref = nx.single_source_shortest_path_length(to_nx(g), s)
    d = bfs_distances(g, s)
    assert all(d[v] == ref.get(v, -1) for v in range(g.n))


def test_remove_vertices_examples():
    h, kept = remove_vertices(cycle_graph(4), {0})
    assert h == path_graph(3) and kept == [1, 2, 3]
    h, _ = remove_vertices(clique_graph(4), {0, 1})
    assert h == Graph(2, [(0, 1)])
    star = Graph(5, [(0, i) for i in range(1, 5)])
    h, _ = remove_vertices(star, {0})
    assert h.m == 0 and h.n == 4 and not is_connected(h)


def test_remove_vertices_errors():
    with pytest.raises(GraphError):
        remove_vertices(cycle_graph(4), {7})
    with pytest.raises(GraphError):
        remove_vertices(path_graph(2), {0, 1})


def test_graph_rejects_bad_edges():
    for edges in ([(0, 0)], [(0, 3)], [(0, 1), (1, 0)]):
        with pytest.raises(GraphError):
            Graph(3, edges)


# ---------------------------------------------------------------- generators

def test_generate_cycle_and_petersen():
    assert generate(GenSpec("cycle", n=8)) == cycle_graph(8)
    p = generate(GenSpec("petersen"))
    assert (p.n, p.m) == (10, 15)
    assert all(p.degree(v) == 3 for v in range(10))
    assert nx.is_isomorphic(to_nx(p), nx.petersen_graph())


def test_planted_exact_example():
    g, S = generate_with_cut(GenSpec("planted_separator", a=6, k=2, b=6, seed=1, exact=True))
    assert vertex_connectivity(g).connectivity == 2
    assert nx.node_connectivity(to_nx(g)) == 2
    assert verify_cut(g, S)


@given(st.integers(1, 12), st.integers(1, 4), st.integers(1, 12), st.integers(0, 2**32))
def test_planted_separator_is_a_cut(a, k, b, seed):
    g, S = generate_with_cut(GenSpec("planted_separator", a=a, k=k, b=b, seed=seed))
    assert g.n == a + k + b and is_connected(g)
    assert verify_cut(g, S)
    assert not any(g.has_edge(u, v) for u in range(a) for v in range(a + k, g.n))


@pytest.mark.parametrize("spec", [
    GenSpec("gnp", n=30, p=0.2, seed=4, connected=True),
    GenSpec("tree", n=50, seed=9),
    GenSpec("planted_separator", n=40, a=10, k=3, seed=2),
])
def test_generate_is_pure(spec):
    assert generate(spec) == generate(spec)


def test_tree_is_tree():
    for seed in range(10):
        g = generate(GenSpec("tree", n=30, seed=seed))
        assert g.m == 29 and is_connected(g)


@pytest.mark.parametrize("spec", [
    GenSpec("clique", n=0),
    GenSpec("cycle", n=2),
    GenSpec("gnp", n=5, p=1.5),
    GenSpec("planted_separator", a=0, k=1, b=3),
    GenSpec("planted_separator", n=10, a=3, k=2, b=3),
    GenSpec("nonsense", n=4),
    GenSpec("gnp", n=50, p=0.0, connected=True, max_retries=2),
])
def test_generate_errors(spec):
    with pytest.raises(GenError):
        generate(spec)


def test_petersen_fixed_graph():
    assert petersen_graph() == generate(GenSpec("petersen"))
