"""In-process network with virtual time.

One event heap orders every delivery; ties are broken by insertion order,
so a run is reproducible from its seed.  Each node processes its inbox
sequentially.  Cryptographic work can be charged to a node's local clock
through a compute model, which makes busy nodes fall behind; the default
model charges nothing.
"""

from __future__ import annotations

import heapq
import itertools
import random
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass, field

from ..protocols.messages import ProtocolMessage
from ..rng import SeededRng
from .config import LatencyModel, NetConfig
from .transport import Transport


@dataclass
class ComputeModel:
    """Seconds charged per operation, keyed by ``(scheme, op)`` or ``op``."""

    costs: dict = field(default_factory=dict)

    def cost(self, scheme, op: str) -> float:
        key = (getattr(scheme, "value", scheme), op)
        if key in self.costs:
            return self.costs[key]
        return self.costs.get(op, 0.0)


@dataclass
class NetStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    tob_ordered: int = 0


class SimNode:
    """A node's processing queue and local clock."""

    def __init__(self, net: "SimulatedNetwork", index: int):
        self.net = net
        self.index = index
        self.inbox: deque[Callable[[], None]] = deque()
        self.busy_until = 0.0
        self.local_time = 0.0
        self.scheduled = False
        self.busy_time = 0.0

    def clock(self) -> float:
        return self.local_time

    def charge(self, seconds: float) -> None:
        self.local_time += seconds
        self.busy_time += seconds

    def enqueue(self, work: Callable[[], None]) -> None:
        self.inbox.append(work)
        if not self.scheduled:
            self.scheduled = True
            self.net.schedule(max(self.net.now, self.busy_until), self._run)

    def _run(self) -> None:
        self.scheduled = False
        if not self.inbox:
            return
        work = self.inbox.popleft()
        self.local_time = max(self.net.now, self.busy_until)
        if self.index not in self.net.crashed:
            work()
        self.busy_until = self.local_time
        if self.inbox:
            self.scheduled = True
            self.net.schedule(self.busy_until, self._run)


class SimTransport(Transport):
    def __init__(self, net: "SimulatedNetwork", node: SimNode):
        self.net = net
        self.node = node
        self.index = node.index
        self.n = net.n
        self.tob_enabled = net.tob_enabled
        self.tob_log: list[bytes] = []
        self._tob_next = 0
        self._tob_hold: dict[int, bytes] = {}

    def p2p_send(self, dest: int, message: ProtocolMessage) -> None:
        self._check_dest(dest)
        data = message.encode()
        if dest == self.index:
            self.net.deliver_now(self.node, data)
        else:
            self.net.transmit(self.index, dest, data, self.node.local_time)

    def tob_broadcast(self, message: ProtocolMessage) -> None:
        self._check_tob()
        self.net.tob_submit(self.index, message.encode(), self.node.local_time)

    def _tob_arrive(self, seq: int, data: bytes) -> None:
        self._tob_hold[seq] = data
        while self._tob_next in self._tob_hold:
            payload = self._tob_hold.pop(self._tob_next)
            self._tob_next += 1
            self.tob_log.append(payload)
            if self.receiver:
                self.receiver(payload)


class SimulatedNetwork:
    def __init__(self, n: int, latency: LatencyModel | None = None, *, seed: bytes | str | int = 0,
                 tob_enabled: bool = False, tob_latency_ms: float = 0.0, compute: ComputeModel | None = None,
                 record_trace: bool = False):
        self.n = n
        self.latency = latency or LatencyModel()
        self.rng = SeededRng(seed).fork("network")
        self.tob_enabled = tob_enabled
        self.tob_latency = tob_latency_ms / 1000.0
        self.compute = compute or ComputeModel()
        self.now = 0.0
        self.crashed: set[int] = set()
        self.stats = NetStats()
        self.trace: list[tuple] | None = [] if record_trace else None
        self._heap: list = []
        self._counter = itertools.count()
        self._tob_seq = 0
        self._tob_order_at = 0.0
        self.nodes = {i: SimNode(self, i) for i in range(1, n + 1)}
        self.transports = {i: SimTransport(self, node) for i, node in self.nodes.items()}

    @classmethod
    def from_config(cls, config: NetConfig, **kw) -> "SimulatedNetwork":
        kw.setdefault("tob_enabled", config.tob_enabled)
        kw.setdefault("tob_latency_ms", config.tob_latency_ms)
        return cls(config.n, config.latency_model, **kw)

    def transport(self, index: int) -> SimTransport:
        return self.transports[index]

    def crash(self, *indices: int) -> None:
        self.crashed.update(indices)

    # -- scheduling -------------------------------------------------------------

    def schedule(self, at: float, callback: Callable[[], None]) -> None:
        heapq.heappush(self._heap, (max(at, self.now), next(self._counter), callback))

    def at(self, when: float, index: int, work: Callable[[], None]) -> None:
        """Run ``work`` on node ``index`` at virtual time ``when`` (queued behind its backlog)."""
        self.schedule(when, lambda: self.nodes[index].enqueue(work))

    def run(self, until: float | None = None, max_events: int | None = None) -> float:
        """Process events in timestamp order; returns the virtual time reached."""
        processed = 0
        while self._heap:
            when, _, callback = self._heap[0]
            if until is not None and when > until:
                self.now = until
                break
            heapq.heappop(self._heap)
            self.now = when
            callback()
            processed += 1
            if max_events is not None and processed >= max_events:
                break
        return self.now

    @property
    def idle(self) -> bool:
        return not self._heap

    # -- delivery ----------------------------------------------------------------

    def meter_for(self, index: int) -> Callable:
        node = self.nodes[index]
        return lambda scheme, op: node.charge(self.compute.cost(scheme, op))

    def transmit(self, src: int, dst: int, data: bytes, sent_at: float) -> None:
        self.stats.sent += 1
        if src in self.crashed or dst in self.crashed:
            self.stats.dropped += 1
            return
        arrive = sent_at + self.latency.sample(src, dst, self.rng)
        if self.trace is not None:
            self.trace.append((round(sent_at, 9), round(arrive, 9), src, dst, len(data)))
        self.schedule(arrive, lambda: self._arrive(dst, data))

    def deliver_now(self, node: SimNode, data: bytes) -> None:
        self.schedule(node.local_time, lambda: self._arrive(node.index, data))

    def _arrive(self, dst: int, data: bytes) -> None:
        if dst in self.crashed:
            self.stats.dropped += 1
            return
        transport = self.transports[dst]

        def work():
            self.stats.delivered += 1
            if transport.receiver:
                transport.receiver(data)

        self.nodes[dst].enqueue(work)

    def tob_submit(self, src: int, data: bytes, sent_at: float) -> None:
        """A sequencer orders messages ``tob_latency`` after submission (FIFO per sender)."""
        if src in self.crashed:
            return
        order_at = max(sent_at + self.tob_latency, self._tob_order_at)
        self._tob_order_at = order_at

        def order():
            seq = self._tob_seq
            self._tob_seq += 1
            self.stats.tob_ordered += 1
            for j, transport in self.transports.items():
                if j in self.crashed:
                    continue
                delay = self.latency.sample(1, j, self.rng)
                self.schedule(order_at + delay, lambda t=transport, s=seq: self.nodes[t.index].enqueue(
                    lambda: t._tob_arrive(s, data)))

        self.schedule(order_at, order)


def run_simulated_clock(net: SimulatedNetwork, until: float | None = None) -> float:
    return net.run(until)
