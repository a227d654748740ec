"""Deterministic synchronous CONGEST round engine."""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .graph import Graph, is_connected
from .wire import Bits, WidthError, id_width, unpack

MASK64 = (1 << 64) - 1
EMPTY_TRACE_HASH = 0x243F6A8885A308D3  # trace hash of a run that sends no message


def mix64(x: int) -> int:
    """splitmix64 finalizer."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def node_seed(global_seed: int, node_id: int) -> int:
    return mix64(mix64(global_seed & MASK64) ^ (node_id * 0xD6E8FEB86659FD93 & MASK64))


class SimError(RuntimeError):
    pass


class BandwidthError(SimError):
    def __init__(self, node: int, rnd: int, receiver: int, bits: int, limit: int):
        super().__init__(f"node {node} sent {bits} bits to {receiver} in round {rnd}; "
                         f"bandwidth is {limit} bits")
        self.node, self.round, self.receiver = node, rnd, receiver


class PortError(SimError):
    def __init__(self, node: int, rnd: int, receiver: Any):
        super().__init__(f"node {node} addressed non-neighbour {receiver!r} in round {rnd}")
        self.node, self.round, self.receiver = node, rnd, receiver


class DisconnectedError(SimError):
    pass


class Message:
    """Payload bits plus the decoded field tuple kept for the receiver's convenience."""

    __slots__ = ("payload", "bit_len", "fields")

    def __init__(self, payload: int, bit_len: int, fields: tuple = ()):
        self.payload = payload
        self.bit_len = bit_len
        self.fields = fields

    @property
    def bits(self) -> Bits:
        return Bits(self.payload, self.bit_len)

    @staticmethod
    def of(bits: Bits) -> "Message":
        return Message(bits.value, bits.length, ())

    def __repr__(self) -> str:
        return f"Message({self.bit_len} bits, fields={self.fields})"


@functools.lru_cache(maxsize=None)
def _compile_packer(widths: tuple[int, ...]) -> Callable[..., int]:
    """A specialised ``pack`` for fixed widths; ``v >> w`` is non-zero for overflow and negatives."""
    names = [f"v{i}" for i in range(len(widths))]
    if not names:
        return lambda: 0
    check = " | ".join(f"({v} >> {w})" for v, w in zip(names, widths))
    expr, shift = [], 0
    for v, w in reversed(list(zip(names, widths))):
        expr.append(f"({v} << {shift})" if shift else v)
        shift += w
    src = (f"def packer({', '.join(names)}):\n"
           f"    if {check}:\n"
           f"        raise WidthError(f'fields {{({', '.join(names)},)}} do not fit widths {widths}')\n"
           f"    return {' | '.join(expr)}\n")
    env: dict[str, Any] = {"WidthError": WidthError}
    exec(src, env)
    return env["packer"]


class Schema:
    """Fixed field widths; ``msg(*values)`` packs a Message."""

    __slots__ = ("widths", "bit_len", "_pack")

    def __init__(self, *widths: int):
        self.widths = tuple(widths)
        self.bit_len = sum(widths)
        self._pack = _compile_packer(self.widths)

    def msg(self, *values: int) -> Message:
        return Message(self._pack(*values), self.bit_len, values)

    def decode(self, payload: int) -> list[int]:
        return unpack(payload, self.widths)


@dataclass(frozen=True)
class NodeView:
    my_id: int
    neighbor_ids: tuple[int, ...]
    n: int
    extra_inputs: Mapping[str, Any]
    rng_seed: int


class NodeProgram:
    """Per-node state machine.

    ``step`` returns an outbox mapping neighbour ID to Message (or None).  A
    program stays scheduled every round unless it calls ``sleep()`` (wake
    on the next incoming message) or ``sleep_until(r)``.
    """

    view: NodeView
    halted: bool = False
    output: Any = None
    _wake: int | None = None

    def init(self, view: NodeView) -> None:
        self.view = view

    def step(self, rnd: int, inbox: dict[int, Message]) -> dict[int, Message] | None:
        raise NotImplementedError

    def halt(self, output: Any = None) -> None:
        self.halted = True
        self.output = output

    def sleep(self) -> None:
        self._wake = None

    def sleep_until(self, rnd: int) -> None:
        self._wake = rnd


@dataclass(frozen=True)
class SimConfig:
    bandwidth_bits: int | None = None  # None: 8 * ceil(log2(n+1))
    max_rounds: int = 1_000_000
    global_seed: int = 0

    def bandwidth_for(self, n: int) -> int:
        return self.bandwidth_bits if self.bandwidth_bits is not None else 8 * id_width(n)

    def validate(self, n: int) -> None:
        if self.max_rounds < 1:
            raise SimError("max_rounds must be >= 1")
        if self.bandwidth_for(n) < id_width(n):
            raise SimError(f"bandwidth {self.bandwidth_for(n)} cannot carry one ID ({id_width(n)} bits)")


@dataclass(frozen=True)
class RunMetrics:
    rounds_used: int
    total_messages: int
    total_bits: int
    max_bits_edge_round: int
    halted_all: bool
    trace_hash: int


@dataclass(frozen=True)
class RunResult:
    outputs: tuple[Any, ...]  # indexed by vertex
    metrics: RunMetrics
    programs: tuple[NodeProgram, ...] = field(repr=False, default=())
    trace: tuple[str, ...] | None = field(repr=False, default=None)


def message_hash(sender: int, receiver: int, payload: int, bit_len: int) -> int:
    x = (payload * 0xD6E8FEB86659FD93 + (sender << 42 | receiver << 16 | bit_len) * 0x9E3779B97F4A7C15)
    while x >> 64:
        x = (x & MASK64) ^ (x >> 64)
    return mix64(x)


def fold_round(h: int, rnd: int, round_acc: int) -> int:
    return mix64(h ^ mix64(rnd) ^ round_acc)


def trace_hash(rounds: Sequence[tuple[int, Sequence[tuple[int, int, int, int]]]]) -> int:
    """Hash of a trace given as (round, [(sender, receiver, payload, bit_len), ...]) pairs.

    Messages inside a round are combined by a commutative sum, so their order
    does not matter; rounds are chained in sequence.  Rounds without
    messages do not contribute.
    """
    h = EMPTY_TRACE_HASH
    for rnd, msgs in rounds:
        if not msgs:
            continue
        acc = 0
        for s, r, p, b in msgs:
            acc = (acc + message_hash(s, r, p, b)) & MASK64
        h = fold_round(h, rnd, acc)
    return h


def default_max_rounds(n: int, diameter: int, kappa: int) -> int:
    lg = max(1, math.ceil(math.log2(max(2, n))))
    return int(64 * kappa ** 3 * (diameter + math.sqrt(n)) * lg ** 3)


def run_sync(g: Graph, program_factory: Callable[[NodeView], NodeProgram], cfg: SimConfig = SimConfig(),
             extra_inputs: Mapping[str, Any] | None = None, ids: Sequence[int] | None = None,
             trace: bool = False, order: Sequence[int] | None = None) -> RunResult:
    """Run ``program_factory`` at every vertex in lock-step rounds.

    ``ids`` optionally relabels vertices (node ``v`` sees ID ``ids[v]``);
    ``order`` permutes the in-round evaluation order, which must not change
    anything observable.
    """
    n = g.n
    if not is_connected(g):
        raise DisconnectedError("the network must be connected")
    cfg.validate(n)
    bw = cfg.bandwidth_for(n)
    extra = dict(extra_inputs or {})
    if ids is None:
        ids = list(range(n))
    ids = list(ids)
    if len(set(ids)) != n:
        raise SimError("ids must be distinct")
    index = {x: v for v, x in enumerate(ids)}
    nbr_ids = [frozenset(ids[w] for w in g.adj[v]) for v in range(n)]
    progs: list[NodeProgram] = []
    for v in range(n):
        view = NodeView(my_id=ids[v], neighbor_ids=tuple(sorted(nbr_ids[v])), n=n,
                        extra_inputs=extra, rng_seed=node_seed(cfg.global_seed, ids[v]))
        prog = program_factory(view)
        prog.init(view)
        progs.append(prog)
    rank = list(range(n)) if order is None else list(order)
    pos = {v: i for i, v in enumerate(rank)}

    h = EMPTY_TRACE_HASH
    total_msgs = total_bits = max_bits = 0
    alive = n
    last_round = 0
    halted = [False] * n
    inbox: dict[int, dict[int, Message]] = {}
    awake = set(range(n))
    timers: list[tuple[int, int]] = []
    lines: list[str] | None = [] if trace else None
    rnd = 0
    while alive and rnd < cfg.max_rounds:
        rnd += 1
        if not inbox and not awake:
            if not timers:
                rnd = cfg.max_rounds  # nothing can ever happen again
                break
            rnd = max(rnd, timers[0][0])
            if rnd > cfg.max_rounds:
                rnd = cfg.max_rounds
                break
        while timers and timers[0][0] <= rnd:
            awake.add(heapq.heappop(timers)[1])
        cur = inbox
        inbox = {}
        todo = awake.union(cur)
        awake = set()
        acc = 0
        sent_any = False
        round_lines = [] if trace else None
        for v in sorted(todo, key=pos.__getitem__) if order is not None else sorted(todo):
            if halted[v]:
                continue
            prog = progs[v]
            prog._wake = rnd + 1
            out = prog.step(rnd, cur.get(v, {}))
            if out:
                me = ids[v]
                nb = nbr_ids[v]
                for rid, msg in out.items():
                    if msg is None:
                        continue
                    if rid not in nb:
                        raise PortError(me, rnd, rid)
                    bl = msg.bit_len
                    if bl > bw or msg.payload >> bl:
                        raise BandwidthError(me, rnd, rid, max(bl, msg.payload.bit_length()), bw)
                    w = index[rid]
                    box = inbox.get(w)
                    if box is None:
                        inbox[w] = {me: msg}
                    else:
                        box[me] = msg
                    total_msgs += 1
                    total_bits += bl
                    if bl > max_bits:
                        max_bits = bl
                    # inlined message_hash
                    x = msg.payload * 0xD6E8FEB86659FD93 + (me << 42 | rid << 16 | bl) * 0x9E3779B97F4A7C15
                    while x >> 64:
                        x = (x & MASK64) ^ (x >> 64)
                    x = (x + 0x9E3779B97F4A7C15) & MASK64
                    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
                    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
                    acc += x ^ (x >> 31)
                    sent_any = True
                    if round_lines is not None:
                        round_lines.append((me, rid, bl, format(msg.payload, f"0{max(1, (bl + 3) // 4)}x")))
            if prog.halted:
                halted[v] = True
                alive -= 1
                last_round = rnd
            else:
                wk = prog._wake
                if wk is not None:
                    if wk <= rnd + 1:
                        awake.add(v)
                    else:
                        heapq.heappush(timers, (wk, v))
        if sent_any:
            h = fold_round(h, rnd, acc & MASK64)
        if round_lines:
            round_lines.sort()
            lines.extend(f"{rnd} {s} {r} {b} {p}" for s, r, b, p in round_lines)
        # messages addressed to halted nodes are delivered nowhere
        for v in [v for v in inbox if halted[v]]:
            del inbox[v]
    rounds_used = last_round if alive == 0 else min(rnd, cfg.max_rounds)
    metrics = RunMetrics(rounds_used=rounds_used, total_messages=total_msgs, total_bits=total_bits,
                         max_bits_edge_round=max_bits, halted_all=alive == 0, trace_hash=h)
    return RunResult(outputs=tuple(p.output for p in progs), metrics=metrics, programs=tuple(progs),
                     trace=tuple(lines) if lines is not None else None)
