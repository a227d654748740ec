"""Distributed vertex-cut detection as a phase plan on PhaseNode.

Phases after the BFS tree / leader election:

``nbrs``     If the minimum degree is at most kappa, the neighbourhood of a
             minimum-degree vertex is a cut; it is gathered at the leader.
``cycle``    Cycle-space sampling: every non-tree edge draws a random label,
             every tree edge gets the XOR of the labels whose fundamental cycle
             contains it.  A vertex is an articulation point iff the labels
             around it have rank at most deg - 2 (whp; false negatives are
             impossible).
``verify``   The candidate articulation point v is checked by a BFS in G - v
             between two neighbours on different sides.
``trial``    Local flow search for cuts of size 2..kappa.  At scale j the
             small side L of a cut (L, S, R) is guessed to satisfy
             2^j <= |L| < 2^(j+1).  Sampled sources run unit-vertex-capacity
             augmenting-path searches (residual BFS with echo) towards
             private random sinks, stopping after kappa + 1 paths; an
             exploration that closes with at most kappa paths exhibits a cut.
``fetch``    The winning source sends its cut to the leader.
``announce`` The leader pipelines the verdict down the tree.
``gather``   (baseline) every edge is sent to the leader, which runs the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import Graph, is_connected, stats
from .oracle import has_cut_at_most, verify_cut
from .primitives import FIRST_PHASE_TAG, TAG_BITS, Driver, Phase, PhaseLog, PhaseNode
from .sim import (MASK64, DisconnectedError, RunMetrics, Schema, SimConfig, default_max_rounds, mix64,
                  run_sync)
from .verdict import CutResult
from .wire import id_width

P_NBRS, P_CYCLE, P_VERIFY, P_TRIAL, P_FETCH, P_ANNOUNCE, P_GATHER = range(7)
TRIAL_BITS = 8
SCALE_BITS = 5
ATT_BITS = 7

# message tags; the runtime owns tags below FIRST_PHASE_TAG, phases may reuse each other's
M_ITEM = M_EDGE = FIRST_PHASE_TAG
M_LBL, M_PHI = FIRST_PHASE_TAG, FIRST_PHASE_TAG + 1
M_XV, M_EV, M_RES = range(FIRST_PHASE_TAG, FIRST_PHASE_TAG + 3)
M_XP, M_EC, M_AU, M_AK, M_FN, M_CI, M_FE = range(FIRST_PHASE_TAG, FIRST_PHASE_TAG + 7)

IN, OUT = 0, 1
LOCAL = -1


def unit_random(seed: int, *keys: int) -> float:
    x = seed
    for k in keys:
        x = mix64(x ^ (k & MASK64))
    return (x >> 11) / float(1 << 53)


@dataclass(frozen=True)
class SearchParams:
    """Constants of the randomized search.  ``c`` scales repetitions (whp exponent)."""

    source_rate: float = 1.0  # expected sources inside a small side of the guessed size
    reps: int = 2  # repetitions per scale, multiplied by c
    c: float = 1.0
    depth_factor: int = 8  # exploration depth cap, in units of the guessed |L u S|
    label_slack: int = 64  # extra cycle-space label bits beyond the degree
    start_depth: int = 2  # first exploration depth; doubled while the search is cut off
    sink_rate: float = 1.0  # sinks are drawn with probability sink_rate / (2^(j+1) + kappa)

    def repetitions(self) -> int:
        return max(1, math.ceil(self.reps * self.c))


# ---------------------------------------------------------------- phase plan

@dataclass(frozen=True)
class PhaseSpec:
    name: str
    budget: Callable[..., int]
    reads: tuple[str, ...] = ()
    writes: tuple[str, ...] = ()


def _lg(n: int) -> int:
    return max(1, math.ceil(math.log2(max(2, n))))


def label_bits(max_degree: int, sp: SearchParams) -> int:
    return max_degree + sp.label_slack


def chunk_bits(n: int, bandwidth: int) -> int:
    return bandwidth - TAG_BITS - id_width(n) - 1


def trial_depth_cap(n: int, kappa: int, j: int, sp: SearchParams) -> int:
    return min(2 * n + 2, sp.depth_factor * ((2 << j) + kappa))


def scales(n: int, kappa: int, min_degree: int) -> list[int]:
    """Exponents j with [2^j, 2^(j+1)) meeting the feasible small-side sizes, largest first."""
    lo = max(2, min_degree - kappa + 1)
    hi = (n - 2) // 2
    out = [j for j in range(1 << SCALE_BITS) if (2 << j) > lo and (1 << j) <= hi]
    return sorted(out, reverse=True)


def trial_schedule(n: int, kappa: int, min_degree: int, sp: SearchParams) -> list[int]:
    js = scales(n, kappa, min_degree)
    sched = [j for _ in range(sp.repetitions()) for j in js]
    if len(sched) >= 1 << TRIAL_BITS:
        raise ValueError("trial schedule too long for the trial counter")
    return sched


BARRIER = lambda D: 2 * D + 4  # noqa: E731  DONE convergecast plus GO broadcast

PLAN: tuple[PhaseSpec, ...] = (
    PhaseSpec("elect", lambda n, D, k, **_: 4 * D + 6, writes=("parent", "children", "depth", "leader")),
    PhaseSpec("nbrs", lambda n, D, k, **_: D + k + 2 + BARRIER(D), reads=("parent",), writes=("verdict",)),
    PhaseSpec("cycle", lambda n, D, k, chunks=1, **_: (2 * D + 4) * (chunks + 1) + BARRIER(D),
              reads=("parent", "children"), writes=("candidate",)),
    PhaseSpec("verify", lambda n, D, k, **_: 2 * n + 4 + BARRIER(D), reads=("candidate",)),
    PhaseSpec("trial", lambda n, D, k, H=1, **_: 4 * (k + 2) * (H + 2) * _lg(n) + BARRIER(D),
              reads=("flow",), writes=("cut",)),
    PhaseSpec("fetch", lambda n, D, k, **_: D + k + 2 + BARRIER(D), reads=("cut",), writes=("verdict",)),
    PhaseSpec("announce", lambda n, D, k, **_: D + k + 2 + BARRIER(D), reads=("verdict",)),
    PhaseSpec("gather", lambda n, D, k, m=0, **_: m + D + 2 + BARRIER(D), writes=("edges",)),
)
PLAN_BY_NAME = {p.name: p for p in PLAN}


def planned_budget(n: int, diameter: int, kappa: int, max_degree: int, min_degree: int,
                   sp: SearchParams = SearchParams(), bandwidth: int | None = None) -> int:
    """Worst-case sum of phase budgets of the main algorithm (every trial runs)."""
    bw = bandwidth or 8 * id_width(n)
    chunks = math.ceil(label_bits(max_degree, sp) / chunk_bits(n, bw))
    D = diameter
    total = PLAN_BY_NAME["elect"].budget(n, D, kappa)
    total += max(PLAN_BY_NAME["nbrs"].budget(n, D, kappa),
                 PLAN_BY_NAME["cycle"].budget(n, D, kappa, chunks=chunks)
                 + PLAN_BY_NAME["verify"].budget(n, D, kappa))
    if kappa >= 2:
        for j in trial_schedule(n, kappa, min_degree, sp):
            total += PLAN_BY_NAME["trial"].budget(n, D, kappa, H=trial_depth_cap(n, kappa, j, sp))
    total += PLAN_BY_NAME["fetch"].budget(n, D, kappa) + PLAN_BY_NAME["announce"].budget(n, D, kappa)
    return total


# ---------------------------------------------------------------- simple phases

class ItemsUp(Phase):
    """Pipelined upcast of ID items to the root along the tree."""

    def __init__(self, node, params):
        super().__init__(node, params)
        self.schema = Schema(TAG_BITS, node.w)

    def my_items(self) -> list[int]:
        return []

    def start(self, rnd):
        node = self.node
        items = self.my_items()
        if node.parent is None:
            node.driver.items.extend(items)
        else:
            for x in items:
                node.send(node.parent, self.schema.msg(M_ITEM, x))
        self.done = True

    def on_message(self, rnd, sender, f):
        node = self.node
        if node.parent is None:
            node.driver.items.append(f[1])
        else:
            node.send(node.parent, self.schema.msg(M_ITEM, f[1]))


class NbrsPhase(ItemsUp):
    name = "nbrs"

    def my_items(self):
        return list(self.node.nbrs) if self.node.id == self.params[0] else []


class FetchPhase(ItemsUp):
    name = "fetch"

    def my_items(self):
        return list(self.node.driver.my_cut) if self.node.id == self.params[0] else []


class GatherPhase(Phase):
    name = "gather"

    def __init__(self, node, params):
        super().__init__(node, params)
        self.schema = Schema(TAG_BITS, node.w, node.w)

    def start(self, rnd):
        node = self.node
        mine = [(node.id, u) for u in node.nbrs if u > node.id]
        if node.parent is None:
            node.driver.edges.extend(mine)
        else:
            for e in mine:
                node.send(node.parent, self.schema.msg(M_EDGE, *e))
        self.done = True

    def on_message(self, rnd, sender, f):
        node = self.node
        if node.parent is None:
            node.driver.edges.append((f[1], f[2]))
        else:
            node.send(node.parent, self.schema.msg(M_EDGE, f[1], f[2]))


class AnnouncePhase(Phase):
    """params = (is_cut, count); the root streams ``count`` IDs down the tree."""

    name = "announce"

    def __init__(self, node, params):
        super().__init__(node, params)
        self.schema = Schema(TAG_BITS, node.w)
        self.got: list[int] = []

    def start(self, rnd):
        node = self.node
        if node.parent is None:
            self.got = list(node.driver.verdict_ids)
            for x in self.got:
                for c in node.children:
                    node.send(c, self.schema.msg(M_ITEM, x))
        self._check()

    def on_message(self, rnd, sender, f):
        node = self.node
        self.got.append(f[1])
        for c in node.children:
            node.send(c, self.schema.msg(M_ITEM, f[1]))
        self._check()

    def _check(self):
        is_cut, count = self.params
        if len(self.got) == count:
            drv = self.node.driver
            kappa = drv.kappa
            drv.verdict = CutResult.cut(kappa, self.got) if is_cut else CutResult.none(kappa)
            self.done = True


# ---------------------------------------------------------------- articulation points

def _null_vectors(vecs: list[int], want: int = 2) -> list[int]:
    """Up to ``want`` independent GF(2) dependencies among ``vecs`` as index bitmasks."""
    basis: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination)
    found = []
    for i, v in enumerate(vecs):
        comb = 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                basis[top] = (v, comb)
                break
            bv, bc = basis[top]
            v ^= bv
            comb ^= bc
        if v == 0:
            found.append(comb)
            if len(found) >= want:
                break
    return found


class CyclePhase(Phase):
    """params = (max degree,).  Report: (candidate or n, side-a neighbour, side-b neighbour)."""

    name = "cycle"

    def __init__(self, node, params):
        super().__init__(node, params)
        n, w = node.n, node.w
        self.bits = label_bits(params[0], node.driver.sp)
        bw = node.driver.bandwidth
        self.cb = chunk_bits(n, bw)
        self.nchunks = max(1, math.ceil(self.bits / self.cb))
        self.schema = Schema(TAG_BITS, w + 1, self.cb)
        self.report_widths = (w, w, w)
        tree = set(node.children)
        if node.parent is not None:
            tree.add(node.parent)
        self.nontree = [u for u in node.nbrs if u not in tree]
        self.labels: dict[int, int] = {}  # neighbour -> label of the edge to it
        self.parts: dict[int, list[int]] = {}  # neighbour -> received chunks
        self.waiting = 0
        self.cand = (n, 0, 0)

    def start(self, rnd):
        node = self.node
        mask = (1 << self.bits) - 1
        for u in self.nontree:
            if node.id < u:
                lab = 0
                key = 0
                while lab.bit_length() < self.bits:  # enough random words
                    lab = (lab << 64) | mix64(node.view.rng_seed ^ mix64(u * 131 + key + 1))
                    key += 1
                lab &= mask
                self.labels[u] = lab
                self._send_chunks(u, M_LBL, lab)
            else:
                self.waiting += 1
        self.waiting += len(node.children)
        self._progress()

    def _send_chunks(self, port, tag, value):
        cb = self.cb
        for i in range(self.nchunks):
            self.node.send(port, self.schema.msg(tag, i, (value >> (i * cb)) & ((1 << cb) - 1)))

    def on_message(self, rnd, sender, f):
        tag, idx, chunk = f
        parts = self.parts.setdefault(sender, [])
        parts.append(chunk)
        if len(parts) == self.nchunks:
            val = 0
            for i, c in enumerate(parts):
                val |= c << (i * self.cb)
            self.labels[sender] = val
            self.waiting -= 1
            self._progress()

    def _progress(self):
        if self.waiting:
            return
        node = self.node
        phi = 0
        for u in self.nontree:
            phi ^= self.labels[u]
        for c in node.children:
            phi ^= self.labels[c]
        if node.parent is not None:
            self.labels[node.parent] = phi
            self._send_chunks(node.parent, M_PHI, phi)
        ports = list(node.nbrs)
        deps = _null_vectors([self.labels[u] for u in ports], want=2)
        if len(deps) >= 2:
            full = (1 << len(ports)) - 1
            d1, d2 = deps
            side = next(d for d in (d1, d2, d1 ^ d2) if d != full and d != 0)
            a = next(ports[i] for i in range(len(ports)) if side >> i & 1)
            b = next(ports[i] for i in range(len(ports)) if not side >> i & 1)
            self.cand = (node.id, a, b)
        self.done = True

    def report(self):
        return self.cand

    @staticmethod
    def combine(a, b):
        return min(a, b)


class VerifyPhase(Phase):
    """params = (v, a, b): is b unreachable from a in G - v?  Report: (separated,)."""

    name = "verify"
    report_widths = (1,)

    def __init__(self, node, params):
        super().__init__(node, params)
        self.schema = Schema(TAG_BITS, 1)
        self.visited = False
        self.parent = None
        self.pending = 0
        self.found = False
        self.sep = 0

    def start(self, rnd):
        node = self.node
        v, a, b = self.params
        if node.id == a:
            self._visit(None)
        self.done = node.id != v and node.id != a

    def _visit(self, parent):
        node = self.node
        v, a, b = self.params
        self.visited = True
        self.parent = parent
        self.found = node.id == b
        targets = [u for u in node.nbrs if u != v and u != parent]
        for u in targets:
            node.send(u, self.schema.msg(M_XV, 0))
        self.pending = len(targets)
        self._maybe_echo()

    def _maybe_echo(self):
        if self.pending:
            return
        node = self.node
        v, a, b = self.params
        if self.parent is not None:
            node.send(self.parent, self.schema.msg(M_EV, 1 if self.found else 0))
        elif node.id == a:
            node.send(v, self.schema.msg(M_RES, 0 if self.found else 1))
            self.done = True

    def on_message(self, rnd, sender, f):
        node = self.node
        tag, bit = f
        if tag == M_XV:
            if self.visited:
                node.send(sender, self.schema.msg(M_EV, 0))
            else:
                self._visit(sender)
        elif tag == M_EV:
            self.found = self.found or bool(bit)
            self.pending -= 1
            self._maybe_echo()
        elif tag == M_RES:
            self.sep = bit
            self.done = True

    def report(self):
        return (self.sep,)

    @staticmethod
    def combine(a, b):
        return (max(a[0], b[0]),)


# ---------------------------------------------------------------- local flow trials

class _Rec:
    """Per-instance state of one node: persistent flow plus per-attempt search tree."""

    __slots__ = ("att", "vis", "par", "pend", "best", "bestc", "front", "kids", "sink", "fpend",
                 "used", "fin")

    def __init__(self):
        self.used = 0  # flow on the internal arc v_in -> v_out
        self.fin: set[int] = set()  # u with flow on u_out -> v_in
        self.att = -1

    def reset(self, att: int, none: int):
        self.att = att
        self.vis = [False, False]
        self.par = [None, None]
        self.pend = [0, 0]
        self.best = [none, none]
        self.bestc = [None, None]
        self.front = [False, False]
        self.kids = [[], []]
        self.fpend = [0, 0]
        self.sink = False


class TrialPhase(Phase):
    """params = (trial index, scale exponent j).  Report: (cut size or 0, source)."""

    name = "trial"

    def __init__(self, node, params):
        super().__init__(node, params)
        drv = node.driver
        n, w = node.n, node.w
        self.t, self.j = params
        self.kappa = drv.kappa
        sp = drv.sp
        self.none = n
        self.report_widths = (w, w)
        self.q = sp.sink_rate / ((2 << self.j) + self.kappa)
        self.h0 = sp.start_depth
        self.H = trial_depth_cap(n, self.kappa, self.j, sp)
        rem_w = max(1, (self.H + 1).bit_length())
        self.s_xp = Schema(TAG_BITS, w, ATT_BITS, 1, rem_w)
        self.s_ec = Schema(TAG_BITS, w, ATT_BITS, 1, 1, 1, w)
        self.s_x = Schema(TAG_BITS, w, ATT_BITS, 1)  # AU, AK, FN
        self.s_ci = Schema(TAG_BITS, w, ATT_BITS, 1, w)
        self.recs: dict[int, _Rec] = {}
        self.nbrset = frozenset(node.nbrs)
        self.seed = node.view.rng_seed
        self.result = (0, n)
        # source state
        self.is_source = False
        deg = len(node.nbrs)
        if deg <= (2 << self.j) - 2 + self.kappa:
            p = min(1.0, sp.source_rate / (1 << self.j))
            self.is_source = unit_random(self.seed, 0x5EED, self.t) < p

    # ------------------------------------------------------------ helpers
    def _rec(self, x: int) -> _Rec:
        r = self.recs.get(x)
        if r is None:
            r = self.recs[x] = _Rec()
        return r

    def _is_sink(self, x: int) -> bool:
        return (x != self.node.id and x not in self.nbrset
                and unit_random(self.seed, 0x51, self.t, x) < self.q)

    # ------------------------------------------------------------ source control
    def start(self, rnd):
        if not self.is_source:
            self.done = True
            return
        self.f = 0
        self.h = min(self.H, self.h0)
        self.att = -1
        self.cut: list[int] = []
        self._new_attempt()

    def _new_attempt(self):
        node = self.node
        x = node.id
        self.att += 1
        if self.att >= 1 << ATT_BITS:
            self._finish(None)
            return
        r = self._rec(x)
        r.reset(self.att, self.none)
        r.vis = [True, True]
        self.child_sinks: dict[tuple[int, int], int] = {}
        self.frontier = False
        targets = list(node.nbrs)
        if self.h <= 0:
            self.frontier = bool(targets)
            targets = []
        msg = self.s_xp.msg(M_XP, x, self.att, IN, self.h - 1) if targets else None
        for u in targets:
            node.send(u, msg)
        r.pend[OUT] = len(targets)
        if not targets:
            self._root_complete()

    def _root_complete(self):
        node = self.node
        x = node.id
        r = self.recs[x]
        sinks = sorted((c, s) for c, s in self.child_sinks.items() if s != self.none)
        if sinks:
            take = sinks[: self.kappa + 1 - self.f]
            self.acks = len(take)
            self.adding = len(take)
            for (u, s), _ in take:
                node.send(u, self.s_x.msg(M_AU, x, self.att, IN))
            return
        if self.frontier:
            if self.h >= self.H:
                self._finish(None)
            else:
                self.h = min(self.H, 2 * self.h)
                self._new_attempt()
            return
        if self.f == 0:
            self._finish(None)
            return
        # closed: the cut vertices answer a final flood-with-echo over the search tree
        self.cut = []
        self._final(x, r, OUT)

    def _on_ack(self):
        self.acks -= 1
        if self.acks == 0:
            self.f += self.adding
            if self.f >= self.kappa + 1:
                self._finish(None)
            else:
                self._new_attempt()

    def _on_cut_id(self, v: int):
        self.cut.append(v)

    def _finish(self, cut):
        if cut is not None:
            self.node.driver.my_cut = cut
            self.result = (len(cut), self.node.id)
        self.done = True

    # ------------------------------------------------------------ search tree
    def _visit(self, x: int, r: _Rec, k: int, parent, rem: int):
        node = self.node
        me = node.id
        r.vis[k] = True
        r.par[k] = parent
        if k == IN and self._is_sink(x):
            r.sink = True
            r.best[k] = me
            self._complete(x, r, k)
            return
        targets: list[int] = []
        local = False
        if k == IN:
            if r.used == 0 and not r.vis[OUT]:
                local = True
            arcs = sorted(r.fin)
            tkind = OUT
        else:
            if r.used == 1 and not r.vis[IN]:
                local = True
            arcs = list(node.nbrs)
            tkind = IN
        if parent is not None and parent != LOCAL:
            pu, pk = parent
            if pk == tkind:
                arcs = [u for u in arcs if u != pu]
        if arcs:
            if rem <= 0:
                r.front[k] = True
            else:
                msg = self.s_xp.msg(M_XP, x, r.att, tkind, rem - 1)
                for u in arcs:
                    node.send(u, msg)
                targets = arcs
        r.pend[k] = len(targets) + (1 if local else 0)
        if local:
            self._visit(x, r, 1 - k, LOCAL, rem)
        elif r.pend[k] == 0:
            self._complete(x, r, k)

    def _complete(self, x: int, r: _Rec, k: int):
        parent = r.par[k]
        if parent is None:
            self._root_complete()
        elif parent == LOCAL:
            self._child_done(x, r, 1 - k, LOCAL, True, r.front[k], r.best[k])
        else:
            pu, pk = parent
            self.node.send(pu, self.s_ec.msg(M_EC, x, r.att, pk, 1, 1 if r.front[k] else 0, r.best[k]))

    def _child_done(self, x: int, r: _Rec, k: int, child, accepted: bool, front: bool, sink: int):
        r.pend[k] -= 1
        if accepted:
            r.kids[k].append(child)
            if front:
                r.front[k] = True
            if sink != self.none and sink < r.best[k]:
                r.best[k] = sink
                r.bestc[k] = child
            if r.par[k] is None:
                self.child_sinks[child] = sink
                if front:
                    self.frontier = True
        if r.pend[k] == 0:
            self._complete(x, r, k)

    # ------------------------------------------------------------ augmentation
    def _augment_from(self, x: int, r: _Rec, k: int):
        """Continue an augmenting path that just entered split node k."""
        node = self.node
        while True:
            if k == IN and r.sink:
                pu, pk = r.par[IN]
                node.send(pu, self.s_x.msg(M_AK, x, r.att, pk))
                return
            c = r.bestc[k]
            if c == LOCAL:
                r.used = 1 if k == IN else 0
                k = 1 - k
                continue
            u, s = c
            if k == IN:
                r.fin.discard(u)
            node.send(u, self.s_x.msg(M_AU, x, r.att, s))
            return

    def _ack_up(self, x: int, r: _Rec, k: int):
        while True:
            p = r.par[k]
            if p is None:
                self._on_ack()
                return
            if p == LOCAL:
                k = 1 - k
                continue
            pu, pk = p
            self.node.send(pu, self.s_x.msg(M_AK, x, r.att, pk))
            return

    def _final(self, x: int, r: _Rec, k: int):
        node = self.node
        if k == IN and not r.vis[OUT] and not r.sink:
            self._cut_up(x, r, IN, node.id)
        kids = r.kids[k]
        r.fpend[k] = len(kids)
        for c in kids:
            if c != LOCAL:
                u, s = c
                node.send(u, self.s_x.msg(M_FN, x, r.att, s))
        if LOCAL in kids:
            self._final(x, r, 1 - k)  # completes this node once the remote kids have echoed
        elif not kids:
            self._final_done(x, r, k)

    def _final_done(self, x: int, r: _Rec, k: int):
        p = r.par[k]
        if p is None:
            if len(self.cut) != self.f:
                raise RuntimeError(f"closed search of {x} found {len(self.cut)} cut vertices for flow {self.f}")
            self._finish(sorted(self.cut))
        elif p == LOCAL:
            self._final_ack(x, r, 1 - k)
        else:
            pu, pk = p
            self.node.send(pu, self.s_x.msg(M_FE, x, r.att, pk))

    def _final_ack(self, x: int, r: _Rec, k: int):
        r.fpend[k] -= 1
        if r.fpend[k] == 0:
            self._final_done(x, r, k)

    def _cut_up(self, x: int, r: _Rec, k: int, v: int):
        while True:
            p = r.par[k]
            if p is None:
                self._on_cut_id(v)
                return
            if p == LOCAL:
                k = 1 - k
                continue
            pu, pk = p
            self.node.send(pu, self.s_ci.msg(M_CI, x, r.att, pk, v))
            return

    # ------------------------------------------------------------ dispatch
    def on_message(self, rnd, sender, f):
        tag = f[0]
        x = f[1]
        att = f[2]
        r = self._rec(x)
        if tag == M_XP:
            k, rem = f[3], f[4]
            if r.att != att:
                r.reset(att, self.none)
            if r.vis[k]:
                self.node.send(sender, self.s_ec.msg(M_EC, x, att, 1 - k, 0, 0, self.none))
            else:
                self._visit(x, r, k, (sender, 1 - k), rem)
        elif tag == M_EC:
            k, acc, front, sink = f[3], f[4], f[5], f[6]
            self._child_done(x, r, k, (sender, 1 - k), bool(acc), bool(front), sink)
        elif tag == M_AU:
            k = f[3]
            if k == IN:
                r.fin.add(sender)
            self._augment_from(x, r, k)
        elif tag == M_AK:
            self._ack_up(x, r, f[3])
        elif tag == M_FN:
            self._final(x, r, f[3])
        elif tag == M_CI:
            self._cut_up(x, r, f[3], f[4])
        elif tag == M_FE:
            self._final_ack(x, r, f[3])

    def report(self):
        return self.result

    @staticmethod
    def combine(a, b):
        ka = (a[0] == 0, a[0], a[1])
        kb = (b[0] == 0, b[0], b[1])
        return a if ka <= kb else b


# ---------------------------------------------------------------- driver

PHASES = {P_NBRS: NbrsPhase, P_CYCLE: CyclePhase, P_VERIFY: VerifyPhase, P_TRIAL: TrialPhase,
          P_FETCH: FetchPhase, P_ANNOUNCE: AnnouncePhase, P_GATHER: GatherPhase}


class VcutDriver(Driver):
    """Root-side plan for ``mode`` in {"main", "kappa1", "baseline"}."""

    def __init__(self, kappa: int, mode: str, sp: SearchParams, bandwidth: int):
        self.kappa = kappa
        self.mode = mode
        self.sp = sp
        self.bandwidth = bandwidth
        self.items: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.my_cut: list[int] = []
        self.verdict: CutResult | None = None
        self.verdict_ids: list[int] = []
        self.schedule: list[int] = []
        self.trial = 0
        self.elect_report = None

    def phase_class(self, code):
        return PHASES[code]

    def param_widths(self, node, code):
        w = node.w
        return {
            P_NBRS: (w,),
            P_CYCLE: (w,),
            P_VERIFY: (w, w, w),
            P_TRIAL: (TRIAL_BITS, SCALE_BITS),
            P_FETCH: (w,),
            P_ANNOUNCE: (1, w),
            P_GATHER: (),
        }[code]

    def budget(self, node, name, params):
        n, D, k = node.n, node.dhat, self.kappa
        spec = PLAN_BY_NAME[name]
        if name == "cycle":
            chunks = math.ceil(label_bits(params[0], self.sp) / chunk_bits(n, self.bandwidth))
            return spec.budget(n, D, k, chunks=chunks)
        if name == "trial":
            return spec.budget(n, D, k, H=trial_depth_cap(n, k, params[1], self.sp))
        if name == "gather":
            return spec.budget(n, D, k, m=n * (n - 1) // 2)
        return spec.budget(n, D, k)

    def _announce(self, verdict: CutResult):
        self.verdict_ids = list(verdict.vertices)
        return P_ANNOUNCE, (1 if verdict.is_cut else 0, len(verdict.vertices))

    def _next_trial(self, node):
        if self.trial < len(self.schedule):
            j = self.schedule[self.trial]
            t = self.trial
            self.trial += 1
            return P_TRIAL, (t, j)
        return self._announce(CutResult.none(self.kappa))

    def plan(self, node, finished, report):
        k = self.kappa
        if finished == "elect":
            self.elect_report = report
            dhat, mindeg, argmin, maxdeg = report
            self.min_degree, self.max_degree = mindeg, maxdeg
            if self.mode == "baseline":
                return P_GATHER, ()
            if mindeg <= k and mindeg <= node.n - 2:
                return P_NBRS, (argmin,)
            return P_CYCLE, (maxdeg,)
        if finished == "nbrs":
            return self._announce(CutResult.cut(k, self.items))
        if finished == "cycle":
            v, a, b = report
            if v < node.n:
                return P_VERIFY, (v, a, b)
            return self._after_articulation(node)
        if finished == "verify":
            if report[0]:
                # the candidate's ID is the first GO parameter of the verify phase
                return self._announce(CutResult.cut(k, [node.phase_params[0]]))
            return self._after_articulation(node)
        if finished == "trial":
            size, x = report
            if size:
                self.fetch_size = size
                self.items = []
                return P_FETCH, (x,)
            return self._next_trial(node)
        if finished == "fetch":
            return self._announce(CutResult.cut(k, self.items))
        if finished == "gather":
            g = Graph(node.n, self.edges)
            return self._announce(has_cut_at_most(g, k))
        return None

    def _after_articulation(self, node):
        if self.mode == "kappa1" or self.kappa == 1:
            return self._announce(CutResult.none(self.kappa))
        self.schedule = trial_schedule(node.n, self.kappa, self.min_degree, self.sp)
        self.trial = 0
        return self._next_trial(node)

    def output(self, node):
        return self.verdict.encode(node.n) if self.verdict is not None else None


# ---------------------------------------------------------------- entry points

@dataclass(frozen=True)
class RunOutcome:
    result: CutResult
    metrics: RunMetrics
    phases: tuple[PhaseLog, ...] = ()
    agreed: bool = True

    def __iter__(self):
        # unpacks as (result, metrics)
        return iter((self.result, self.metrics))

    @property
    def budget_overruns(self) -> list[PhaseLog]:
        return [p for p in self.phases if p.budget is not None and p.end >= 0 and p.rounds > p.budget]


def _check_inputs(g: Graph, kappa: int) -> None:
    if g.n < 3:
        raise ValueError("need n >= 3")
    if not 1 <= kappa <= g.n - 2:
        raise ValueError(f"kappa must lie in [1, n-2], got {kappa} for n={g.n}")
    if not is_connected(g):
        raise DisconnectedError("the network must be connected")


def _run(g: Graph, kappa: int, mode: str, cfg: SimConfig | None, sp: SearchParams) -> RunOutcome:
    _check_inputs(g, kappa)
    if cfg is None:
        st = stats(g)
        cfg = SimConfig(max_rounds=default_max_rounds(g.n, st.diameter, kappa))
    bw = cfg.bandwidth_for(g.n)
    res = run_sync(g, lambda view: PhaseNode(VcutDriver(kappa, mode, sp, bw)), cfg,
                   extra_inputs={"kappa": kappa, "bandwidth": bw})
    if not res.metrics.halted_all:
        return RunOutcome(CutResult.timeout(kappa), res.metrics)
    outs = res.outputs
    agreed = all(o == outs[0] for o in outs)
    verdict = CutResult.decode(outs[0], g.n)
    root = next(p for p in res.programs if p.parent is None)
    return RunOutcome(verdict, res.metrics, tuple(root.logs), agreed)


def find_vertex_cut(g: Graph, kappa: int, cfg: SimConfig | None = None,
                    sp: SearchParams = SearchParams()) -> RunOutcome:
    return _run(g, kappa, "main", cfg, sp)


def kappa_one_cut(g: Graph, cfg: SimConfig | None = None, sp: SearchParams = SearchParams()) -> RunOutcome:
    return _run(g, 1, "kappa1", cfg, sp)


def find_cut_baseline_gather(g: Graph, kappa: int, cfg: SimConfig | None = None) -> RunOutcome:
    if cfg is None:
        cfg = SimConfig(max_rounds=10 * (g.m + g.n) + 1000)
    return _run(g, kappa, "baseline", cfg, SearchParams())


@dataclass
class SeedRecord:
    seed: int
    result: CutResult
    rounds_used: int
    verified: bool | None
    match: bool
    direction: str  # "ok", "false_negative", "false_positive", "timeout", "unverified"


@dataclass
class VerifiedReport:
    records: list[SeedRecord]
    oracle: CutResult
    false_negatives: int
    false_positives: int
    timeouts: int
    all_cuts_verified: bool
    rounds_min: int
    rounds_max: int
    rounds_mean: float

    @property
    def mismatches(self) -> int:
        return sum(1 for r in self.records if not r.match)


def classify(g: Graph, result: CutResult, oracle: CutResult) -> tuple[bool | None, bool, str]:
    """(verified, match, direction) of one verdict against the oracle."""
    if result.kind == "timeout":
        return None, False, "timeout"
    if result.is_cut:
        ok = 1 <= len(result.vertices) <= result.kappa and verify_cut(g, result.vertices)
        if not ok:
            return False, False, "unverified"
        return True, oracle.is_cut, "ok" if oracle.is_cut else "false_positive"
    return None, not oracle.is_cut, "ok" if not oracle.is_cut else "false_negative"


def run_with_verification(g: Graph, kappa: int, seeds: Sequence[int], algo: str = "main",
                          sp: SearchParams = SearchParams(), max_rounds: int | None = None) -> VerifiedReport:
    if not seeds:
        raise ValueError("need at least one seed")
    oracle = has_cut_at_most(g, kappa)
    st = stats(g)
    recs = []
    for s in seeds:
        mr = max_rounds or default_max_rounds(g.n, st.diameter, kappa)
        cfg = SimConfig(max_rounds=mr, global_seed=s)
        if algo == "main":
            out = find_vertex_cut(g, kappa, cfg, sp)
        elif algo == "kappa1":
            out = kappa_one_cut(g, cfg, sp)
        else:
            out = find_cut_baseline_gather(g, kappa, SimConfig(max_rounds=max_rounds or 10 * (g.m + g.n) + 1000,
                                                               global_seed=s))
        verified, match, direction = classify(g, out.result, oracle)
        recs.append(SeedRecord(s, out.result, out.metrics.rounds_used, verified, match, direction))
    rounds = [r.rounds_used for r in recs]
    return VerifiedReport(
        records=recs,
        oracle=oracle,
        false_negatives=sum(r.direction == "false_negative" for r in recs),
        false_positives=sum(r.direction == "false_positive" for r in recs),
        timeouts=sum(r.direction == "timeout" for r in recs),
        all_cuts_verified=all(r.verified is not False for r in recs),
        rounds_min=min(rounds),
        rounds_max=max(rounds),
        rounds_mean=sum(rounds) / len(rounds),
    )
