import itertools
import random

import networkx as nx
import pytest
from hypothesis import HealthCheck, settings

from vcut.graph import Graph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def from_nx(h: nx.Graph) -> Graph:
    idx = {v: i for i, v in enumerate(sorted(h.nodes))}
    return Graph(len(idx), [(idx[u], idx[v]) for u, v in h.edges])


def random_connected(rng: random.Random, n: int, p: float) -> Graph:
    """Random spanning tree plus G(n, p) edges, so always connected."""
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u, v = order[i], order[rng.randrange(i)]
        edges.add((min(u, v), max(u, v)))
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            edges.add((u, v))
    return Graph(n, edges)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
