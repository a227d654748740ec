"""Undirected simple graphs: edge-list I/O, statistics and seeded generators."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

INF_DIAMETER = -1  # sentinel used by GraphStats for disconnected graphs


class GraphError(ValueError):
    """Invalid graph construction or operation."""


class EdgeListError(GraphError):
    """Malformed edge-list text. ``line`` is 1-based."""

    kind = "malformed"

    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {self.kind}: {detail}")
        self.line = line
        self.detail = detail


class HeaderError(EdgeListError):
    kind = "malformed header"


class MalformedEdgeError(EdgeListError):
    kind = "malformed edge"


class EndpointRangeError(EdgeListError):
    kind = "endpoint out of range"


class SelfLoopError(EdgeListError):
    kind = "self-loop"


class DuplicateEdgeError(EdgeListError):
    kind = "duplicate edge"


class EdgeCountError(EdgeListError):
    kind = "edge count mismatch"


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "adj", "_edge_set")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        norm = set()
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in norm:
                raise GraphError(f"duplicate edge {e}")
            norm.add(e)
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        self._edge_set = frozenset(norm)
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in nbrs)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    diameter: int  # INF_DIAMETER when disconnected
    max_degree: int
    min_degree: int
    is_connected: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "diameter": self.diameter if self.is_connected else None,
            "max_degree": self.max_degree,
            "min_degree": self.min_degree,
            "is_connected": self.is_connected,
        }


# ---------------------------------------------------------------- edge lists

def parse_edge_list(text: str) -> Graph:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise HeaderError(1, "missing header")
    n, m = _parse_pair(lines[0], 1, HeaderError)
    if n < 0 or m < 0:
        raise HeaderError(1, "negative count")
    if len(lines) - 1 != m:
        raise EdgeCountError(len(lines) + 1 if len(lines) - 1 < m else m + 2,
                             f"header declares {m} edges, found {len(lines) - 1}")
    seen: set[tuple[int, int]] = set()
    edges = []
    for i, line in enumerate(lines[1:], start=2):
        u, v = _parse_pair(line, i, MalformedEdgeError)
        if u == v:
            raise SelfLoopError(i, f"{u} {v}")
        if not (0 <= u < n and 0 <= v < n):
            raise EndpointRangeError(i, f"{u} {v} with n={n}")
        if u > v:
            u, v = v, u  # accepted on input; emit_edge_list writes u < v
        if (u, v) in seen:
            raise DuplicateEdgeError(i, f"{u} {v}")
        seen.add((u, v))
        edges.append((u, v))
    return Graph(n, edges)


def _parse_pair(line: str, lineno: int, err: type[EdgeListError]) -> tuple[int, int]:
    parts = line.split(" ")
    if len(parts) != 2 or not all(p.isdigit() and p.isascii() for p in parts):
        raise err(lineno, repr(line))
    return int(parts[0]), int(parts[1])


def emit_edge_list(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- queries

def bfs_distances(g: Graph, source: int, removed: frozenset[int] | set[int] = frozenset()) -> list[int]:
    """Hop distances from ``source``; -1 for unreachable or removed vertices."""
    dist = [-1] * g.n
    dist[source] = 0
    dq = deque([source])
    adj = g.adj
    while dq:
        u = dq.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] < 0 and w not in removed:
                dist[w] = du
                dq.append(w)
    return dist


def is_connected(g: Graph) -> bool:
    if g.n <= 1:
        return True
    return min(bfs_distances(g, 0)) >= 0


def components(g: Graph) -> list[list[int]]:
    """Connected components, each sorted, ordered by smallest vertex."""
    label = [-1] * g.n
    comps = []
    for s in range(g.n):
        if label[s] >= 0:
            continue
        label[s] = len(comps)
        comp = [s]
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for w in g.adj[u]:
                if label[w] < 0:
                    label[w] = label[s]
                    comp.append(w)
                    dq.append(w)
        comps.append(sorted(comp))
    return comps


def _csr(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum([len(a) for a in g.adj], out=indptr[1:])
    indices = np.fromiter((w for a in g.adj for w in a), dtype=np.int64, count=int(indptr[-1]))
    return indptr, indices


@numba.njit(cache=True)
def _all_ecc(indptr, indices, n):
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for i in range(indptr[v], indptr[v + 1]):
                w = indices[i]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        ecc[s] = dist[queue[tail - 1]]
    return ecc


def eccentricities(g: Graph) -> list[int]:
    """Per-vertex BFS eccentricity; -1 everywhere if disconnected."""
    if g.n == 0:
        return []
    if not is_connected(g):
        return [-1] * g.n
    indptr, indices = _csr(g)
    return [int(x) for x in _all_ecc(indptr, indices, g.n)]


def stats(g: Graph) -> GraphStats:
    conn = is_connected(g)
    degs = [len(a) for a in g.adj]
    if conn:
        diameter = max(eccentricities(g)) if g.n > 1 else 0
    else:
        diameter = INF_DIAMETER
    return GraphStats(
        n=g.n,
        m=g.m,
        diameter=diameter,
        max_degree=max(degs, default=0),
        min_degree=min(degs, default=0),
        is_connected=conn,
    )


def remove_vertices(g: Graph, s: Iterable[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on the remaining vertices.

    Returns the re-indexed graph and ``kept`` where ``kept[new] = old``.
    """
    s = set(s)
    for v in s:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    if len(s) >= g.n:
        raise GraphError("cannot remove every vertex")
    kept = [v for v in range(g.n) if v not in s]
    new = {v: i for i, v in enumerate(kept)}
    edges = [(new[u], new[v]) for u, v in g.edges if u in new and v in new]
    return Graph(len(kept), edges), kept


# ---------------------------------------------------------------- generators

FAMILIES = ("cycle", "path", "clique", "tree", "gnp", "planted_separator", "petersen")


class GenError(GraphError):
    """Invalid generator parameters or exhausted retry budget."""


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int | None = None
    p: float | None = None
    a: int | None = None
    k: int | None = None
    b: int | None = None
    density: float | None = None  # extra edge probability inside each side
    side_degree: int | None = None  # random partners drawn per vertex inside its side
    connected: bool = False  # gnp: redraw until connected
    exact: bool = False  # planted: redraw until connectivity is exactly k
    seed: int = 0
    max_retries: int = 50

    def descriptor(self) -> str:
        parts = [self.family]
        for name in ("n", "p", "a", "k", "b", "density", "side_degree"):
            val = getattr(self, name)
            if val is not None:
                parts.append(f"{name}={val}")
        if self.connected:
            parts.append("connected")
        if self.exact:
            parts.append("exact")
        parts.append(f"seed={self.seed}")
        return ",".join(parts)


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise GenError(msg)


def cycle_graph(n: int) -> Graph:
    _need(n >= 3, f"cycle needs n >= 3, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    _need(n >= 1, f"path needs n >= 1, got {n}")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def clique_graph(n: int) -> Graph:
    _need(n >= 1, f"clique needs n >= 1, got {n}")
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


PETERSEN_EDGES = (
    [(i, (i + 1) % 5) for i in range(5)]
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    + [(i, i + 5) for i in range(5)]
)


def petersen_graph() -> Graph:
    return Graph(10, PETERSEN_EDGES)


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    """Uniform random labeled tree via a Pruefer sequence."""
    _need(n >= 1, f"tree needs n >= 1, got {n}")
    if n <= 2:
        return path_graph(n)
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    import heapq
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Graph(n, edges)


def gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    _need(n >= 1, f"gnp needs n >= 1, got {n}")
    _need(0.0 <= p <= 1.0, f"gnp needs 0 <= p <= 1, got {p}")
    edges = []
    for u in range(n - 1):
        hits = np.flatnonzero(rng.random(n - u - 1) < p)
        edges.extend((u, u + 1 + int(j)) for j in hits)
    return Graph(n, edges)


def _side_edges(members: Sequence[int], density: float, side_degree: int,
                rng: np.random.Generator, edges: set[tuple[int, int]]) -> None:
    """Connected random graph on ``members``: random tree, per-vertex partners, extra G(p) edges."""
    k = len(members)
    if k <= 1:
        return
    order = [members[i] for i in rng.permutation(k)]
    for i in range(1, k):
        j = int(rng.integers(0, i))
        _add(edges, order[i], order[j])
    if side_degree > 0:
        for v in members:
            for j in rng.choice(k, size=min(side_degree, k - 1), replace=False):
                w = members[int(j)]
                if w != v:
                    _add(edges, v, w)
    if density > 0:
        for i in range(k - 1):
            hits = np.flatnonzero(rng.random(k - i - 1) < density)
            for j in hits:
                _add(edges, members[i], members[i + 1 + int(j)])


def _add(edges: set[tuple[int, int]], u: int, v: int) -> None:
    if u != v:
        edges.add((u, v) if u < v else (v, u))


def planted_separator_graph(a: int, k: int, b: int, density: float, side_degree: int,
                            rng: np.random.Generator) -> tuple[Graph, list[int]]:
    """Sides A=[0,a), S=[a,a+k), B=[a+k,n) with no A-B edge. Returns (graph, S)."""
    n = a + k + b
    A = list(range(a))
    S = list(range(a, a + k))
    B = list(range(a + k, n))
    edges: set[tuple[int, int]] = set()
    _side_edges(A + S, density, side_degree, rng, edges)
    _side_edges(S + B, density, side_degree, rng, edges)
    # each separator vertex reaches both sides, with side_degree partners when possible
    for s in S:
        for side in (A, B):
            want = max(1, min(side_degree, len(side)))
            for j in rng.choice(len(side), size=want, replace=False):
                _add(edges, s, side[int(j)])
    return Graph(n, edges), S


def default_side_degree(k: int) -> int:
    return k + 2


def default_density(a: int, k: int, b: int) -> float:
    side = max(a, b) + k
    return min(1.0, 2.0 / max(1, side))


def generate(spec: GenSpec) -> Graph:
    return generate_with_cut(spec)[0]


def generate_with_cut(spec: GenSpec) -> tuple[Graph, list[int] | None]:
    """Generate a graph; planted families also return the planted separator."""
    fam = spec.family
    _need(fam in FAMILIES, f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")
    rng = np.random.default_rng(spec.seed & 0xFFFFFFFFFFFFFFFF)
    if fam == "petersen":
        return petersen_graph(), None
    if fam in ("cycle", "path", "clique", "tree", "gnp"):
        _need(spec.n is not None, f"{fam} needs n")
        n = int(spec.n)
        if fam == "cycle":
            return cycle_graph(n), None
        if fam == "path":
            return path_graph(n), None
        if fam == "clique":
            return clique_graph(n), None
        if fam == "tree":
            return random_tree(n, rng), None
        _need(spec.p is not None, "gnp needs p")
        for _ in range(spec.max_retries if spec.connected else 1):
            g = gnp_graph(n, float(spec.p), rng)
            if not spec.connected or is_connected(g):
                return g, None
        raise GenError(f"gnp(n={n}, p={spec.p}) not connected after {spec.max_retries} draws")
    # planted separator
    a, k, b = spec.a, spec.k, spec.b
    if spec.n is not None and a is not None and k is not None and b is None:
        b = spec.n - a - k
    _need(a is not None and k is not None and b is not None, "planted_separator needs a, k, b")
    _need(a >= 1 and b >= 1 and k >= 1, f"planted_separator needs a, b, k >= 1, got a={a} k={k} b={b}")
    _need(spec.n is None or spec.n == a + k + b, f"n={spec.n} differs from a+k+b={a + k + b}")
    density = default_density(a, k, b) if spec.density is None else float(spec.density)
    _need(0.0 <= density <= 1.0, f"density must lie in [0, 1], got {density}")
    side_degree = default_side_degree(k) if spec.side_degree is None else int(spec.side_degree)
    _need(side_degree >= 0, "side_degree must be non-negative")
    tries = spec.max_retries if spec.exact else 1
    for _ in range(tries):
        g, S = planted_separator_graph(a, k, b, density, side_degree, rng)
        if not spec.exact:
            return g, S
        from .oracle import vertex_connectivity
        rep = vertex_connectivity(g, cap=k)
        if not rep.capped and rep.connectivity == k:
            return g, S
    raise GenError(f"planted_separator(a={a}, k={k}, b={b}) did not reach connectivity {k} "
                   f"in {spec.max_retries} draws")
