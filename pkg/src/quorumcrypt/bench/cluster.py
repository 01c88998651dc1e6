"""An in-process cluster: one instance manager per node over a simulated network."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from ..network.config import LatencyModel, NetConfig
from ..network.simulated import ComputeModel, SimulatedNetwork
from ..orchestration import EventLog, InstanceManager, KeyStore, OrchestrationConfig, ThresholdRequest
from ..rng import SeededRng
from ..schemes.core import KeyShare


@dataclass
class Sample:
    instance: str
    node: int
    t_received: float
    t_finalized: float

    @property
    def latency(self) -> float:
        return self.t_finalized - self.t_received


class SimCluster:
    def __init__(self, n: int, shares: Iterable[KeyShare], *, latency: LatencyModel | None = None,
                 seed: bytes | str | int = 0, compute: ComputeModel | None = None, tob_enabled: bool = False,
                 tob_latency_ms: float = 0.0, orchestration: dict | None = None, record_trace: bool = False):
        self.n = n
        self.net = SimulatedNetwork(n, latency, seed=seed, tob_enabled=tob_enabled,
                                    tob_latency_ms=tob_latency_ms, compute=compute, record_trace=record_trace)
        self.events = EventLog(keep=True)
        by_party: dict[int, list[KeyShare]] = {i: [] for i in range(1, n + 1)}
        for share in shares:
            by_party[share.index].append(share)
        base = SeededRng(seed)
        options = dict(orchestration or {})
        options.setdefault("tob_enabled", tob_enabled)
        self.managers: dict[int, InstanceManager] = {}
        for i in range(1, n + 1):
            transport = self.net.transport(i)
            manager = InstanceManager(
                KeyStore(i, by_party[i]), transport.send, clock=self.net.nodes[i].clock,
                rng=base.fork(f"node-{i}"), config=OrchestrationConfig(**options), events=self.events,
                meter=self.net.meter_for(i),
            )
            transport.set_receiver(manager.dispatch_incoming)
            self.managers[i] = manager
        self.errors: list[tuple[int, str]] = []

    @classmethod
    def from_config(cls, config: NetConfig, shares, **kw) -> "SimCluster":
        kw.setdefault("latency", config.latency_model)
        kw.setdefault("tob_enabled", config.tob_enabled)
        kw.setdefault("tob_latency_ms", config.tob_latency_ms)
        return cls(config.n, shares, **kw)

    def crash(self, *indices: int) -> None:
        self.net.crash(*indices)

    def submit(self, request: ThresholdRequest, at: float | None = None, nodes: Iterable[int] | None = None) -> bytes:
        """Deliver ``request`` to each target node at virtual time ``at`` (default: now)."""
        when = self.net.now if at is None else at
        for i in nodes if nodes is not None else range(1, self.n + 1):
            self.net.at(when, i, lambda m=self.managers[i]: self._start(m, request))
        return request.instance_id()

    def _start(self, manager: InstanceManager, request: ThresholdRequest) -> None:
        try:
            manager.start_instance(request)
        except Exception as exc:  # recorded, the run goes on
            self.errors.append((manager.index, f"{type(exc).__name__}: {exc}"))

    def precompute(self, count: int, key_id: str = "default") -> None:
        for i, m in self.managers.items():
            if i not in self.net.crashed:
                self.net.at(self.net.now, i, lambda m=m: m.precompute(count, key_id))
        self.run()

    def run(self, until: float | None = None) -> float:
        return self.net.run(until)

    def samples(self) -> list[Sample]:
        started = {}
        out = []
        for r in self.events.records:
            key = (r.get("instance"), r.get("node"))
            if r["event"] == "instance_started":
                started[key] = r["t"]
            elif r["event"] == "instance_finished" and key in started:
                out.append(Sample(key[0], key[1], started[key], r["t"]))
        return out

    def results(self, iid: bytes) -> dict[int, object]:
        return {i: m.poll_result(iid) for i, m in self.managers.items()}
