"""Exact sequential vertex-connectivity oracle.

s-t connectivity is a unit-vertex-capacity max flow on the split graph
(v_in -> v_out with capacity 1, edge arcs unbounded) found by BFS
augmenting paths, stopped after ``cap + 1`` augmentations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numba
import numpy as np

from .graph import Graph, is_connected, remove_vertices
from .verdict import CutResult


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class StCutCertificate:
    value: int
    cut: frozenset[int]
    paths: tuple[tuple[int, ...], ...] = ()
    capped: bool = False  # value == cap + 1, i.e. "more than cap"


@dataclass(frozen=True)
class ConnectivityReport:
    connectivity: int
    witness_cut: frozenset[int]
    capped: bool = False
    complete: bool = False
    disconnected: bool = False


class _Csr:
    """CSR arrays plus the index of each arc's reverse arc."""

    def __init__(self, g: Graph):
        deg = np.fromiter((len(a) for a in g.adj), dtype=np.int64, count=g.n)
        self.indptr = np.zeros(g.n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.indptr[1:])
        self.indices = np.fromiter(itertools.chain.from_iterable(g.adj), dtype=np.int64,
                                   count=int(self.indptr[-1]))
        twin = np.empty_like(self.indices)
        pos = {}
        for u in range(g.n):
            for e in range(self.indptr[u], self.indptr[u + 1]):
                pos[(u, int(self.indices[e]))] = e
        for (u, w), e in pos.items():
            twin[e] = pos[(w, u)]
        self.twin = twin


@numba.njit(cache=True)
def _st_flow(indptr, indices, twin, n, s, t, limit, flow, used, reach):
    """Augment up to ``limit`` unit paths from s to t.

    Split node ids: 2v is v_in, 2v+1 is v_out.  ``flow[e]`` is the flow on
    arc u_out -> w_in for CSR arc e = (u, w).  ``used[v]`` is the flow on
    v_in -> v_out.  On return ``reach`` marks split nodes reachable from
    s_out in the final residual graph.  Returns the flow value.
    """
    total = 0
    N = 2 * n
    par = np.empty(N, np.int64)  # predecessor split node
    parc = np.empty(N, np.int64)  # arc index used (-1 internal, <= -2 reversed arc)
    queue = np.empty(N, np.int64)
    src = 2 * s + 1
    while total < limit:
        for i in range(N):
            reach[i] = 0
        reach[src] = 1
        reach[2 * s] = 1  # the source has no capacity limit; never route through s_in
        head = 0
        tail = 0
        queue[tail] = src
        tail += 1
        found = False
        while head < tail and not found:
            x = queue[head]
            head += 1
            v = x >> 1
            if x & 1:
                # v_out: forward edge arcs to every w_in; internal back-arc to v_in if used
                if v != s and used[v] == 1 and reach[2 * v] == 0:
                    reach[2 * v] = 1
                    par[2 * v] = x
                    parc[2 * v] = -1
                    queue[tail] = 2 * v
                    tail += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    y = 2 * w
                    if reach[y] == 0:
                        reach[y] = 1
                        par[y] = x
                        parc[y] = e
                        if w == t:
                            found = True
                            break
                        queue[tail] = y
                        tail += 1
            else:
                # v_in: internal arc to v_out if unused; reverse arcs to u_out carrying flow into v
                if used[v] == 0 and reach[2 * v + 1] == 0:
                    reach[2 * v + 1] = 1
                    par[2 * v + 1] = x
                    parc[2 * v + 1] = -1
                    queue[tail] = 2 * v + 1
                    tail += 1
                for e in range(indptr[v], indptr[v + 1]):
                    u = indices[e]
                    te = twin[e]  # arc (u, v)
                    y = 2 * u + 1
                    if flow[te] > 0 and reach[y] == 0:
                        reach[y] = 1
                        par[y] = x
                        parc[y] = -2 - te  # reverse traversal of arc te
                        queue[tail] = y
                        tail += 1
        if not found:
            return total
        # walk back from t_in
        y = 2 * t
        while y != src:
            x = par[y]
            c = parc[y]
            if c >= 0:
                flow[c] += 1
            elif c == -1:
                v = y >> 1
                if y & 1:
                    used[v] = 1
                else:
                    used[v] = 0
            else:
                flow[-2 - c] -= 1
            y = x
        total += 1
    return total


@numba.njit(cache=True)
def _pair_scan(indptr, indices, twin, n, pi, pj, best):
    """Scan candidate pairs in order, lowering ``best`` on every improvement.

    Returns the index of the last improving pair (or -1) and the final best.
    """
    flow = np.zeros(len(indices), np.int64)
    used = np.zeros(n, np.int64)
    reach = np.zeros(2 * n, np.int8)
    hit = -1
    for k in range(len(pi)):
        if best <= 1:
            break
        flow[:] = 0
        used[:] = 0
        val = _st_flow(indptr, indices, twin, n, pi[k], pj[k], best, flow, used, reach)
        if val < best:
            best = val
            hit = k
    return hit, best


def _candidate_pairs(g: Graph, method: str, limit: int, v: int) -> tuple[np.ndarray, np.ndarray]:
    n = g.n
    pairs: list[tuple[int, int]] = []
    if method == "all_pairs":
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if not g.has_edge(i, j)]
    elif method == "even":
        pairs = [(i, j) for i in range(min(limit, n)) for j in range(i + 1, n) if not g.has_edge(i, j)]
    elif method == "neighborhood":
        nb = set(g.adj[v])
        pairs = [(v, w) for w in range(n) if w != v and w not in nb]
        ns = g.adj[v]
        pairs += [(x, y) for i, x in enumerate(ns) for y in ns[i + 1:] if not g.has_edge(x, y)]
    else:
        raise OracleError(f"unknown method {method!r}")
    if not pairs:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    arr = np.asarray(pairs, dtype=np.int64)
    return arr[:, 0].copy(), arr[:, 1].copy()


def _decompose(csr: _Csr, s: int, t: int, flow: np.ndarray) -> tuple[tuple[int, ...], ...]:
    flow = flow.copy()
    paths = []
    while True:
        path = [s]
        v = s
        while v != t:
            for e in range(csr.indptr[v], csr.indptr[v + 1]):
                if flow[e] > 0:
                    flow[e] -= 1
                    v = int(csr.indices[e])
                    path.append(v)
                    break
            else:
                break
        if v != t:
            return tuple(paths)
        # strip cycles so that every path is simple
        seen = {}
        simple = []
        for x in path:
            if x in seen:
                del simple[seen[x] + 1:]
                seen = {y: i for i, y in enumerate(simple)}
            else:
                seen[x] = len(simple)
                simple.append(x)
        paths.append(tuple(simple))


def _st(csr: _Csr, n: int, s: int, t: int, cap: int, with_paths: bool) -> StCutCertificate:
    flow = np.zeros(len(csr.indices), dtype=np.int64)
    used = np.zeros(n, dtype=np.int64)
    reach = np.zeros(2 * n, dtype=np.int8)
    value = int(_st_flow(csr.indptr, csr.indices, csr.twin, n, s, t, cap + 1, flow, used, reach))
    paths = _decompose(csr, s, t, flow) if with_paths else ()
    if value > cap:
        return StCutCertificate(value=cap + 1, cut=frozenset(), paths=paths, capped=True)
    cut = frozenset(v for v in range(n) if v != s and reach[2 * v] and not reach[2 * v + 1])
    return StCutCertificate(value=value, cut=cut, paths=paths)


def st_vertex_connectivity(g: Graph, s: int, t: int, cap: int, with_paths: bool = True) -> StCutCertificate:
    if s == t:
        raise OracleError("s and t must differ")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise OracleError("s or t out of range")
    if g.has_edge(s, t):
        raise OracleError(f"s={s} and t={t} are adjacent; vertex cut undefined")
    if cap < 1:
        raise OracleError("cap must be >= 1")
    return _st(_Csr(g), g.n, s, t, cap, with_paths)


def vertex_connectivity(g: Graph, cap: int | None = None, method: str = "neighborhood") -> ConnectivityReport:
    """Exact vertex connectivity, or ``capped`` when it exceeds ``cap``.

    The minimum is taken over s-t connectivities of a pair set that is
    guaranteed to contain a pair split by some minimum cut:

    * ``"neighborhood"`` (default): with v of minimum degree, pairs (v, w)
      for every non-neighbour w, plus non-adjacent pairs inside N(v).  A
      minimum cut either avoids v, or contains v and then v has neighbours
      on both sides.
    * ``"even"``: sources restricted to the first ``min(cap+1, n-1)`` IDs.
    * ``"all_pairs"``: every non-adjacent pair.

    The neighbourhood of v seeds the search, being a cut of any non-complete graph.
    """
    n = g.n
    if n < 2:
        raise OracleError("vertex_connectivity needs n >= 2")
    if not is_connected(g):
        return ConnectivityReport(0, frozenset(), disconnected=True)
    if g.is_complete():
        k = n - 1
        capped = cap is not None and k > cap
        return ConnectivityReport(min(k, cap + 1) if capped else k, frozenset(), capped=capped, complete=True)
    limit = n - 1 if cap is None else min(cap + 1, n - 1)
    v = min(range(n), key=lambda x: (g.degree(x), x))
    best, best_cut = limit, frozenset()
    if g.degree(v) < best:
        best, best_cut = g.degree(v), frozenset(g.adj[v])
    csr = _Csr(g)
    pi, pj = _candidate_pairs(g, method, limit, v)
    hit, val = _pair_scan(csr.indptr, csr.indices, csr.twin, n, pi, pj, best)
    if hit >= 0:
        cert = _st(csr, n, int(pi[hit]), int(pj[hit]), int(val), with_paths=False)
        best, best_cut = cert.value, cert.cut
    if not best_cut:
        return ConnectivityReport(limit, frozenset(), capped=True)
    return ConnectivityReport(best, best_cut)


def has_cut_at_most(g: Graph, kappa: int) -> CutResult:
    if not 1 <= kappa <= g.n - 2:
        raise OracleError(f"kappa must lie in [1, n-2], got {kappa} for n={g.n}")
    if not is_connected(g):
        raise OracleError("graph is disconnected")
    rep = vertex_connectivity(g, cap=kappa)
    if not rep.capped and rep.connectivity <= kappa and rep.witness_cut:
        return CutResult.cut(kappa, sorted(rep.witness_cut))
    return CutResult.none(kappa)


def verify_cut(g: Graph, s) -> bool:
    s = set(s)
    if not s:
        raise OracleError("cut must be non-empty")
    if len(s) >= g.n:
        raise OracleError("cut covers every vertex")
    h, _ = remove_vertices(g, s)
    return not is_connected(h)


def _bitmask_adj(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _mask_connected(masks: list[int], alive: int) -> bool:
    if alive == 0:
        return True
    start = alive & -alive
    seen = start
    frontier = start
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= masks[low.bit_length() - 1]
            f ^= low
        nxt &= alive & ~seen
        seen |= nxt
        frontier = nxt
    return seen == alive


BRUTE_FORCE_MAX_N = 12


def brute_force_min_cut(g: Graph) -> ConnectivityReport:
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise OracleError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n < 2:
        raise OracleError("brute force needs n >= 2")
    masks = _bitmask_adj(g)
    full = (1 << n) - 1
    if not _mask_connected(masks, full):
        return ConnectivityReport(0, frozenset(), disconnected=True)
    for size in range(1, n - 1):
        for sub in itertools.combinations(range(n), size):
            rm = 0
            for v in sub:
                rm |= 1 << v
            if not _mask_connected(masks, full & ~rm):
                return ConnectivityReport(size, frozenset(sub))
    return ConnectivityReport(n - 1, frozenset(), complete=True)


def brute_force_st_separator(g: Graph, s: int, t: int) -> int:
    """Smallest vertex set (avoiding s, t) separating non-adjacent s and t."""
    masks = _bitmask_adj(g)
    others = [v for v in range(g.n) if v not in (s, t)]
    full = (1 << g.n) - 1
    for size in range(0, len(others) + 1):
        for sub in itertools.combinations(others, size):
            alive = full
            for v in sub:
                alive &= ~(1 << v)
            # BFS from s inside alive
            seen = 1 << s
            frontier = seen
            while frontier:
                nxt = 0
                f = frontier
                while f:
                    low = f & -f
                    nxt |= masks[low.bit_length() - 1]
                    f ^= low
                nxt &= alive & ~seen
                seen |= nxt
                frontier = nxt
            if not seen >> t & 1:
                return size
    raise OracleError("s and t cannot be separated")


def brute_force_disjoint_paths(g: Graph, s: int, t: int) -> int:
    """Maximum number of internally vertex-disjoint s-t paths by exhaustive search."""
    interiors: set[int] = set()

    def walk(v: int, seen: int) -> None:
        for w in g.adj[v]:
            if w == t:
                interiors.add(seen & ~(1 << s))
            elif not seen >> w & 1:
                walk(w, seen | 1 << w)

    walk(s, 1 << s)
    # minimal interior sets suffice for packing
    sets = sorted(interiors, key=lambda m: bin(m).count("1"))
    minimal: list[int] = []
    for m in sets:
        if not any(x & m == x for x in minimal):
            minimal.append(m)
    best = 0

    def pack(i: int, used: int, count: int) -> None:
        nonlocal best
        if count + (len(minimal) - i) <= best:
            return
        if i == len(minimal):
            best = max(best, count)
            return
        if minimal[i] & used == 0:
            pack(i + 1, used | minimal[i], count + 1)
        pack(i + 1, used, count)

    pack(0, 0, 0)
    return best
