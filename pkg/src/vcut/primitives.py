"""CONGEST building blocks and a phase-composition runtime.

A ``PhaseNode`` runs a sequence of phases.  The first phase builds a BFS
tree by flood-with-echo (from the minimum ID, or from a given root).  Every
later phase starts in the same round at all nodes and ends with a barrier:
a convergecast of DONE messages (carrying an aggregated report) followed by
a GO broadcast that schedules the next phase ``D_hat + 1`` rounds later,
where ``D_hat`` is the depth of the tree.  The root chooses the next phase
from the report.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from .graph import Graph
from .sim import Message, NodeProgram, NodeView, RunResult, Schema, SimConfig, run_sync
from .wire import WidthError, id_width

TAG_BITS = 4
T_DONE, T_GO, T_FINISH, T_EXP, T_ECHO = 0, 1, 2, 3, 4
FIRST_PHASE_TAG = 5
CODE_BITS = 4


@dataclass(frozen=True)
class BfsLabel:
    root: int
    parent: int  # the node itself at the root
    depth: int


@dataclass
class PhaseLog:
    name: str
    start: int
    end: int = -1
    budget: int | None = None

    @property
    def rounds(self) -> int:
        return self.end - self.start + 1


class Phase:
    """Node-local part of one phase.

    Subclasses send through ``self.node.send`` and set ``self.done`` once the
    node will originate no further messages in this phase.
    """

    name = "phase"
    report_widths: tuple[int, ...] = ()

    def __init__(self, node: "PhaseNode", params: tuple[int, ...]):
        self.node = node
        self.params = params
        self.done = False

    def start(self, rnd: int) -> None:
        self.done = True

    def on_batch(self, rnd: int, batch: list[tuple[int, tuple]]) -> None:
        for sender, fields in batch:
            self.on_message(rnd, sender, fields)

    def on_message(self, rnd: int, sender: int, fields: tuple) -> None:
        raise RuntimeError(f"{self.name}: unexpected message {fields} from {sender}")

    def on_tick(self, rnd: int) -> None:
        pass

    def report(self) -> tuple[int, ...]:
        return ()

    @staticmethod
    def combine(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
        return a


class Driver:
    """Phase catalogue and root-side planning for a PhaseNode."""

    initiators: frozenset[int] | None = None  # None: leader election among all nodes

    def phase_class(self, code: int) -> type[Phase]:
        raise NotImplementedError

    def param_widths(self, node: "PhaseNode", code: int) -> tuple[int, ...]:
        return ()

    def plan(self, node: "PhaseNode", finished: str, report: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
        """Root only: the next phase (code, params) or None to finish."""
        return None

    def output(self, node: "PhaseNode") -> Any:
        return None

    def budget(self, node: "PhaseNode", name: str, params: tuple[int, ...]) -> int | None:
        return None


class ElectPhase(Phase):
    """Flood-with-echo from every initiator; the smallest ID's wave wins.

    Without explicit initiators, nodes whose ID is below all neighbour IDs
    start waves (KT1: neighbour IDs are known).

    Waves travel one hop per round on per-port registers that always carry
    the newest wave, so the winning wave builds an exact BFS tree.  A node
    answers a wave by echoing once its other neighbours have either echoed
    or sent the same wave.  Echoes aggregate (max depth, min degree and its
    owner, max degree); the wave's origin completes only if every node joined
    its wave, so completion certifies the minimum.
    """

    name = "elect"
    INF = None

    def __init__(self, node: "PhaseNode", params=()):
        super().__init__(node, params)
        w = node.w
        self.exp_schema = Schema(TAG_BITS, w, w)  # tag, wave, depth
        self.echo_schema = Schema(TAG_BITS, w, w, w, w, w)  # tag, wave, maxdepth, mindeg, argmin, maxdeg
        self.best: int | None = None
        self.parent: int | None = None
        self.depth = 0
        self.pending: set[int] = set()
        self.kids: set[int] = set()
        self.agg = (0, 0, 0, 0)
        self.echoed = False

    def _own_agg(self) -> tuple[int, int, int, int]:
        node = self.node
        return (self.depth, len(node.nbrs), node.id, len(node.nbrs))

    def start(self, rnd: int) -> None:
        node = self.node
        inits = node.driver.initiators
        if inits is None:
            # only local minima start a wave; the global minimum is one of them
            if not node.nbrs or node.id < node.nbrs[0]:
                self._adopt(node.id, None, 0)
        elif node.id in inits:
            self._adopt(node.id, None, 0)

    def _adopt(self, wave: int, parent: int | None, depth: int) -> None:
        node = self.node
        self.best, self.parent, self.depth = wave, parent, depth
        self.kids = set()
        self.echoed = False
        self.pending = set(node.nbrs)
        self.pending.discard(parent)
        self.agg = self._own_agg()
        msg = self.exp_schema.msg(T_EXP, wave, depth)
        for u in node.nbrs:
            if u == parent:
                node.put(u, None)
            else:
                node.put(u, msg)
        self._check()

    def on_batch(self, rnd: int, batch: list[tuple[int, tuple]]) -> None:
        # adopt the smallest incoming wave first (smallest sender breaks ties)
        offers = [(f[1], s, f[2]) for s, f in batch if f[0] == T_EXP]
        if offers:
            wave, sender, depth = min(offers)
            if self.best is None or wave < self.best:
                self._adopt(wave, sender, depth + 1)
        for s, f in batch:
            if f[1] != self.best:
                continue
            if f[0] == T_EXP:
                if s != self.parent:
                    self.pending.discard(s)
            elif f[0] == T_ECHO:
                self.pending.discard(s)
                self.kids.add(s)
                md, mind, argm, maxd = self.agg
                _, cmd, cmind, cargm, cmaxd = f[1:]
                if (cmind, cargm) < (mind, argm):
                    mind, argm = cmind, cargm
                self.agg = (max(md, cmd), mind, argm, max(maxd, cmaxd))
        self._check()

    def _check(self) -> None:
        if self.pending or self.best is None or self.echoed:
            return
        node = self.node
        self.echoed = True
        node.tree_ready(self.parent, sorted(self.kids), self.depth, self.best)
        if self.parent is None:
            node.root_complete(self.agg)
        else:
            # a smaller wave may still arrive and rebuild the tree
            node.put(self.parent, self.echo_schema.msg(T_ECHO, self.best, *self.agg))


class ConvergePhase(Phase):
    """Each node contributes one value; the barrier report folds them with ``op``."""

    name = "converge"
    OPS: dict[str, Callable[[int, int], int]] = {
        "min": min,
        "max": max,
        "sum": lambda a, b: a + b,
        "count": lambda a, b: a + b,
    }

    def __init__(self, node: "PhaseNode", params: tuple[int, ...]):
        super().__init__(node, params)
        drv = node.driver
        self.op = drv.op
        self.report_widths = (drv.width,)

    def start(self, rnd: int) -> None:
        self.done = True

    def report(self) -> tuple[int, ...]:
        drv = self.node.driver
        value = 1 if self.op == "count" else drv.inputs.get(self.node.id, drv.identity())
        if value < 0 or value >> drv.width:
            raise WidthError(f"value {value} does not fit {drv.width} bits")
        return (value,)

    def combine(self, a, b):
        return (self.OPS[self.op](a[0], b[0]),)


class PhaseNode(NodeProgram):
    """NodeProgram hosting a phase sequence with synchronized starts."""

    def __init__(self, driver: Driver):
        self.driver = driver

    def init(self, view: NodeView) -> None:
        super().init(view)
        self.id = view.my_id
        self.nbrs = view.neighbor_ids
        self.n = view.n
        self.w = id_width(view.n)
        self.slot: dict[int, Message | None] = {}
        self.queue: dict[int, deque] = {u: deque() for u in self.nbrs}
        self.busy_ports: set[int] = set()
        self.parent: int | None = None
        self.children: list[int] = []
        self.depth = 0
        self.leader = -1
        self.dhat = 0
        self.phase: Phase = ElectPhase(self)
        self.phase_code = -1
        self.phase_params: tuple[int, ...] = ()
        self.want_tick = False
        self.start_at: int | None = None
        self.next_code: int | None = None
        self.next_params: tuple[int, ...] = ()
        self.kids_done = 0
        self.kid_report: tuple[int, ...] | None = None
        self.reported = False
        self.finishing = False
        self.logs: list[PhaseLog] = []
        self.rnd = 0
        self.started = False

    # ---------------------------------------------------------- sending
    def put(self, port: int, msg: Message | None) -> None:
        """Replace the register of ``port``; the register preempts the FIFO queue."""
        if msg is None:
            self.slot.pop(port, None)
        else:
            self.slot[port] = msg

    def send(self, port: int, msg: Message) -> None:
        self.queue[port].append(msg)
        self.busy_ports.add(port)

    # ---------------------------------------------------------- tree hooks
    def tree_ready(self, parent, children, depth, leader) -> None:
        self.parent, self.children, self.depth, self.leader = parent, children, depth, leader

    def root_complete(self, agg) -> None:
        """Called at the root when the tree phase completes."""
        self.dhat = agg[0]
        self.elect_report = agg
        self.logs.append(PhaseLog("elect", 1, self.rnd, self.driver.budget(self, "elect", ())))
        self._decide("elect", agg)

    # ---------------------------------------------------------- barrier
    def _decide(self, finished: str, report: tuple[int, ...]) -> None:
        nxt = self.driver.plan(self, finished, report)
        if nxt is None:
            self._finish()
            return
        code, params = nxt
        self._go(code, params)

    def _go(self, code: int, params: tuple[int, ...]) -> None:
        widths = self.driver.param_widths(self, code)
        schema = Schema(TAG_BITS, CODE_BITS, self.w, *widths)
        msg = schema.msg(T_GO, code, self.dhat, *params)
        for c in self.children:
            self._push_front(c, msg)
        self.start_at = self.rnd + (self.dhat - self.depth) + 1
        self.next_code, self.next_params = code, tuple(params)

    def _push_front(self, port: int, msg: Message) -> None:
        self.queue[port].appendleft(msg)
        self.busy_ports.add(port)

    def _finish(self) -> None:
        msg = Schema(TAG_BITS).msg(T_FINISH)
        for c in self.children:
            self._push_front(c, msg)
        self.finishing = True

    def _maybe_report(self) -> None:
        ph = self.phase
        if self.reported or not ph.done or self.phase_code < 0 or self.kids_done < len(self.children):
            return
        rep = ph.report()
        if self.kid_report is not None:
            rep = ph.combine(rep, self.kid_report)
        self.reported = True
        if self.parent is None:
            log = self.logs[-1]
            log.end = self.rnd
            self._decide(ph.name, rep)
        else:
            self.send(self.parent, Schema(TAG_BITS, *ph.report_widths).msg(T_DONE, *rep))

    def _start_phase(self) -> None:
        code, params = self.next_code, self.next_params
        cls = self.driver.phase_class(code)
        self.phase = cls(self, params)
        self.phase_code, self.phase_params = code, params
        self.kids_done = 0
        self.kid_report = None
        self.reported = False
        self.want_tick = False
        self.start_at = None
        if self.parent is None:
            self.logs.append(PhaseLog(cls.name, self.rnd, -1, self.driver.budget(self, cls.name, params)))
        self.phase.start(self.rnd)

    # ---------------------------------------------------------- main loop
    def step(self, rnd: int, inbox: dict[int, Message]) -> dict[int, Message] | None:
        self.rnd = rnd
        if not self.started:
            self.started = True
            self.phase.start(rnd)
        batch = []
        for s in sorted(inbox):
            f = inbox[s].fields
            tag = f[0]
            if tag == T_DONE:
                rep = tuple(f[1:])
                self.kid_report = rep if self.kid_report is None else self.phase.combine(self.kid_report, rep)
                self.kids_done += 1
            elif tag == T_GO:
                self.dhat = f[2]
                code, params = f[1], tuple(f[3:])
                for c in self.children:
                    self._push_front(c, inbox[s])
                self.start_at = rnd + (self.dhat - self.depth) + 1
                self.next_code, self.next_params = code, params
            elif tag == T_FINISH:
                for c in self.children:
                    self._push_front(c, inbox[s])
                self.finishing = True
            else:
                batch.append((s, f))
        if batch:
            self.phase.on_batch(rnd, batch)
        if self.start_at is not None and rnd >= self.start_at:
            self._start_phase()
        if self.want_tick:
            self.phase.on_tick(rnd)
        self._maybe_report()
        out = {}
        for port, msg in self.slot.items():
            out[port] = msg
        self.slot.clear()
        if self.busy_ports:
            for port in list(self.busy_ports):
                if port in out:
                    continue
                q = self.queue[port]
                out[port] = q.popleft()
                if not q:
                    self.busy_ports.discard(port)
        if self.finishing and not self.busy_ports:
            self.halt(self.driver.output(self))
        elif self.busy_ports or self.want_tick:
            pass  # stay awake
        elif self.start_at is not None:
            self.sleep_until(self.start_at)
        else:
            self.sleep()
        return out


# ---------------------------------------------------------------- standalone programs

class _TreeOnly(Driver):
    def __init__(self, initiators=None, out: str = "leader"):
        self.initiators = initiators
        self.out = out

    def output(self, node):
        if self.out == "leader":
            return node.leader
        return BfsLabel(node.leader, node.id if node.parent is None else node.parent, node.depth)

    def budget(self, node, name, params):
        return 4 * node.dhat + 4


class _Aggregate(Driver):
    def __init__(self, op: str, inputs: dict[int, int], width: int):
        if op not in ConvergePhase.OPS:
            raise ValueError(f"unknown aggregate op {op!r}")
        self.op, self.inputs, self.width = op, inputs, width
        self.result: int | None = None

    def identity(self) -> int:
        return {"min": (1 << self.width) - 1, "max": 0, "sum": 0, "count": 0}[self.op]

    def phase_class(self, code):
        return ConvergePhase if code == 0 else _Deliver

    def param_widths(self, node, code):
        return () if code == 0 else (self.width,)

    def plan(self, node, finished, report):
        if finished == "elect":
            return 0, ()
        if finished == "converge":
            return 1, report
        return None

    def output(self, node):
        return self.result

    def budget(self, node, name, params):
        return 4 * node.dhat + 4


class _Deliver(Phase):
    name = "deliver"

    def start(self, rnd):
        self.node.driver.result = self.params[0]
        self.done = True


class _Broadcast(Driver):
    def __init__(self, root: int, value: int, width: int):
        self.initiators = frozenset([root])
        self.value, self.width = value, width
        self.result: int | None = None

    def phase_class(self, code):
        return _Deliver

    def param_widths(self, node, code):
        return (self.width,)

    def plan(self, node, finished, report):
        return (0, (self.value,)) if finished == "elect" else None

    def output(self, node):
        return self.result


def leader_election(g: Graph, cfg: SimConfig = SimConfig(), ids: Sequence[int] | None = None) -> RunResult:
    return run_sync(g, lambda v: PhaseNode(_TreeOnly()), cfg, ids=ids)


def bfs_tree(g: Graph, root: int, cfg: SimConfig = SimConfig()) -> RunResult:
    return run_sync(g, lambda v: PhaseNode(_TreeOnly(frozenset([root]), out="bfs")), cfg)


def converge_aggregate(g: Graph, op: str, inputs: dict[int, int], width: int,
                       cfg: SimConfig = SimConfig()) -> RunResult:
    """Fold ``inputs`` (node ID to value) with ``op`` at the leader and re-broadcast it."""
    return run_sync(g, lambda v: PhaseNode(_Aggregate(op, inputs, width)), cfg)


def broadcast(g: Graph, root: int, value: int, width: int, cfg: SimConfig = SimConfig()) -> RunResult:
    return run_sync(g, lambda v: PhaseNode(_Broadcast(root, value, width)), cfg)


class ComponentLabel(NodeProgram):
    """Min-label flooding in G - excluded for n rounds."""

    def __init__(self, excluded: frozenset[int]):
        self.excluded = excluded

    def init(self, view):
        super().init(view)
        self.schema = Schema(id_width(view.n))
        self.label = view.my_id
        self.fresh = True

    def step(self, rnd, inbox):
        v = self.view
        if v.my_id in self.excluded:
            self.halt(None)
            return None
        for msg in inbox.values():
            if msg.fields[0] < self.label:
                self.label = msg.fields[0]
                self.fresh = True
        if rnd > v.n:
            self.halt(self.label)
            return None
        out = None
        if self.fresh:
            m = self.schema.msg(self.label)
            out = {u: m for u in v.neighbor_ids if u not in self.excluded}
            self.fresh = False
        if rnd < v.n:
            self.sleep_until(v.n + 1)
        return out


def component_label(g: Graph, excluded: Iterable[int], cfg: SimConfig = SimConfig()) -> RunResult:
    ex = frozenset(excluded)
    return run_sync(g, lambda v: ComponentLabel(ex), cfg)
