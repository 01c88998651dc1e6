"""The instance manager: creates, drives and retires protocol instances.

Requests arrive from the service layer through ``start_instance``; protocol
messages arrive from the network through ``dispatch_incoming``.  Each instance
owns one TRI protocol object that is only touched under the instance's lock,
so different instances can progress in parallel while each one processes its
messages sequentially.
"""

from __future__ import annotations

import enum
import json
import random
import threading
import time
from collections import OrderedDict
from collections.abc import Callable
from dataclasses import dataclass, field

from ..protocols import (
    CONTROL_ROUND,
    Channel,
    DecodeError,
    FrostProtocol,
    MessageCounters,
    PrecomputedSlot,
    Progress,
    ProtocolMessage,
    ProtocolResult,
    SingleRoundProtocol,
    TriProtocol,
)
from ..rng import system_rng
from ..schemes import registry
from ..schemes.core import SchemeId, b64, canonical_json, unb64
from ..schemes.errors import InvalidCiphertextError, MalformedError, SigningSetError
from ..schemes.kg20 import FrostNonceStore, decode_commitment, encode_commitment
from . import events as ev
from .keystore import KeyStore
from .requests import RequestKind, ThresholdRequest

CONTROL_ID = bytes(16)


class InstanceState(str, enum.Enum):
    CREATED = "created"
    RUNNING = "running"
    FINISHED = "finished"
    FAILED = "failed"


_FORWARD = {
    InstanceState.CREATED: {InstanceState.RUNNING, InstanceState.FAILED},
    InstanceState.RUNNING: {InstanceState.FINISHED, InstanceState.FAILED},
    InstanceState.FINISHED: set(),
    InstanceState.FAILED: set(),
}


@dataclass
class InstanceRecord:
    id: bytes
    request: ThresholdRequest
    state: InstanceState = InstanceState.CREATED
    result: ProtocolResult | None = None
    error: str | None = None
    started_at: float | None = None
    finished_at: float | None = None
    counters: MessageCounters = field(default_factory=MessageCounters)
    protocol: TriProtocol | None = field(default=None, repr=False)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def advance(self, state: InstanceState) -> None:
        if state not in _FORWARD[self.state]:
            raise RuntimeError(f"illegal transition {self.state.value} -> {state.value}")
        self.state = state

    @property
    def done(self) -> bool:
        return self.state in (InstanceState.FINISHED, InstanceState.FAILED)


@dataclass(frozen=True)
class PollResult:
    status: str  # pending | finished | failed | unknown
    result: bytes | None = None
    error: str | None = None

    @property
    def done(self) -> bool:
        return self.status in ("finished", "failed")


@dataclass
class OrchestrationConfig:
    retention_s: float = 60.0
    max_retained: int = 100_000
    pending_capacity: int = 10_000
    #: relay client requests to all peers so they start the instance too
    forward_requests: bool = False
    tob_enabled: bool = False
    #: KG20 instances use precomputed nonce slots instead of a live round one
    frost_precompute: bool = False


class InvalidRequestError(ValueError):
    pass


class InstanceManager:
    def __init__(self, keystore: KeyStore, send: Callable[[ProtocolMessage], None], *,
                 clock: Callable[[], float] = time.monotonic, rng: random.Random | None = None,
                 config: OrchestrationConfig | None = None, events: ev.EventLog | None = None,
                 meter: Callable[[SchemeId, str], None] | None = None):
        self.keystore = keystore
        self.index = keystore.index
        self.send = send
        self.clock = clock
        self.rng = rng or system_rng()
        self.config = config or OrchestrationConfig()
        self.events = events or ev.EventLog()
        self.meter = meter
        self.dropped = 0
        self.pending_evicted = 0
        self.retired = 0
        self._records: dict[bytes, InstanceRecord] = {}
        self._finished: OrderedDict[bytes, float] = OrderedDict()
        self._pending: OrderedDict[bytes, list[ProtocolMessage]] = OrderedDict()
        self._pending_count = 0
        self._lock = threading.RLock()
        # FROST precomputation: own nonces and everyone's commitments per key
        self._nonce_stores: dict[str, FrostNonceStore] = {}
        self._commitments: dict[str, dict[int, dict]] = {}
        self._next_slot: dict[str, int] = {}

    # -- service side -----------------------------------------------------------

    def start_instance(self, request: ThresholdRequest, *, relay: bool | None = None) -> bytes:
        """Start (or find) the instance for ``request`` and run its first round."""
        entry = self.keystore.get(request.scheme, request.key_id)
        iid = request.instance_id()
        with self._lock:
            self._expire()
            if iid in self._records:
                return iid
        try:
            decoded = request.decoded()
        except MalformedError as exc:
            raise InvalidRequestError(f"undecodable request: {exc}") from exc
        if request.kind is RequestKind.DECRYPT:
            self._charge(request.scheme, "verify_request")
            if not registry.get(request.scheme).verify_ciphertext(entry.public, decoded):
                raise InvalidCiphertextError("ciphertext failed its validity check")
        with self._lock:
            if iid in self._records:
                return iid
            record = InstanceRecord(iid, request)
            self._records[iid] = record
            early = self._pending.pop(iid, [])
            self._pending_count -= len(early)
        if relay if relay is not None else self.config.forward_requests:
            self._send_control({"type": "request", "request": request.to_dict()}, iid)
        with record.lock:
            record.started_at = self.clock()
            self.events.emit(ev.INSTANCE_STARTED, node=self.index, instance=iid.hex(),
                             scheme=request.scheme.value, t=record.started_at)
            try:
                record.protocol = self._build_protocol(iid, entry.share, request, decoded)
            except (SigningSetError, KeyError, ValueError) as exc:
                self._fail(record, f"cannot start: {exc}")
                return iid
            record.advance(InstanceState.RUNNING)
            self._step(record, record.protocol.do_round())
            for m in early:
                if record.done:
                    record.counters.late += 1
                    continue
                self._deliver(record, m)
        return iid

    def poll_result(self, iid: bytes) -> PollResult:
        with self._lock:
            self._expire()
            record = self._records.get(bytes(iid))
        if record is None:
            return PollResult("unknown")
        with record.lock:
            if record.state is InstanceState.FINISHED:
                return PollResult("finished", record.result.encoded)
            if record.state is InstanceState.FAILED:
                return PollResult("failed", error=record.error)
            return PollResult("pending")

    def record(self, iid: bytes) -> InstanceRecord | None:
        with self._lock:
            return self._records.get(bytes(iid))

    def records(self) -> list[InstanceRecord]:
        with self._lock:
            return list(self._records.values())

    # -- network side ------------------------------------------------------------

    def dispatch_incoming(self, data: bytes | ProtocolMessage) -> None:
        if isinstance(data, ProtocolMessage):
            m = data
        else:
            try:
                m = ProtocolMessage.decode(data)
            except (DecodeError, ValueError) as exc:
                self._drop(f"undecodable message: {exc}")
                return
        if m.is_control:
            self._on_control(m)
            return
        with self._lock:
            record = self._records.get(m.instance_id)
            if record is None:
                self._buffer(m)
                return
        with record.lock:
            if record.done or record.protocol is None:
                if record.done:
                    record.counters.late += 1
                    self.events.emit(ev.LATE_MESSAGE, node=self.index, instance=m.instance_id.hex(),
                                     sender=m.sender, t=self.clock())
                else:
                    record.counters.received += 1
                return
            self._deliver(record, m)

    # -- FROST precomputation ----------------------------------------------------------

    def precompute(self, count: int, key_id: str = "default") -> list[int]:
        """Generate ``count`` nonce slots for the local KG20 key and publish their commitments."""
        self.keystore.get(SchemeId.KG20, key_id)  # unknown key fails early
        store = self._nonce_stores.setdefault(key_id, FrostNonceStore(self.index))
        pairs = store.generate(count, self.rng)
        self._charge(SchemeId.KG20, "frost_round1", count)
        table = self._commitments.setdefault(key_id, {})
        for slot, c in pairs:
            table.setdefault(slot, {})[self.index] = c
        self._send_control({
            "type": "precompute", "key_id": key_id, "party": self.index,
            "slots": [[slot, b64(encode_commitment(c))] for slot, c in pairs],
        }, CONTROL_ID)
        return [slot for slot, _ in pairs]

    def precomputed_slots(self, key_id: str = "default") -> dict[int, set[int]]:
        return {slot: set(parties) for slot, parties in self._commitments.get(key_id, {}).items()}

    # -- internals --------------------------------------------------------------------

    def _build_protocol(self, iid: bytes, share, request: ThresholdRequest, decoded) -> TriProtocol:
        meter = (lambda op, s=request.scheme: self._charge(s, op)) if self.meter else (lambda op: None)
        rng = self.rng
        if request.scheme is SchemeId.KG20:
            signing_set = request.signing_set or registry.get(SchemeId.KG20).default_signing_set(share.params)
            precomputed = None
            if self.config.frost_precompute:
                precomputed = self._take_slot(request, share, signing_set)
            return FrostProtocol(iid, share, decoded, signing_set, rng=rng, tob=self.config.tob_enabled,
                                 precomputed=precomputed, meter=meter)
        return SingleRoundProtocol(iid, share, decoded, rng=rng, meter=meter)

    def _take_slot(self, request: ThresholdRequest, share, signing_set) -> PrecomputedSlot:
        key_id = request.key_id
        with self._lock:
            if request.slot is not None:
                slot = request.slot
            else:
                slot = self._next_slot.get(key_id, 0)
                self._next_slot[key_id] = slot + 1
        commitments = self._commitments.get(key_id, {}).get(slot, {})
        missing = [i for i in signing_set if i not in commitments]
        if missing:
            raise KeyError(f"no precomputed commitments in slot {slot} for parties {missing}")
        nonces = None
        if share.index in signing_set:
            nonces = self._nonce_stores[key_id].take(slot)
        return PrecomputedSlot({i: commitments[i] for i in signing_set}, nonces)

    def _deliver(self, record: InstanceRecord, m: ProtocolMessage) -> None:
        p = record.protocol
        before = p.counters.rejected
        record.counters.received += 1
        progress = p.update(m)
        if p.counters.rejected > before:
            record.counters.rejected += 1
            self.events.emit(ev.SHARE_REJECTED, node=self.index, instance=record.id.hex(), sender=m.sender,
                             round=m.round, t=self.clock())
        self._progress(record, progress)

    def _step(self, record: InstanceRecord, out: ProtocolMessage | None) -> None:
        """Hand an outgoing message to the network and feed it to ourselves."""
        if out is None:
            self._progress(record, self._current_progress(record))
            return
        self.send(out)
        if out.recipients is None or self.index in out.recipients:
            self._deliver_own(record, out)
        else:
            self._progress(record, self._current_progress(record))

    def _deliver_own(self, record: InstanceRecord, m: ProtocolMessage) -> None:
        self._progress(record, record.protocol.update(m))

    @staticmethod
    def _current_progress(record: InstanceRecord) -> Progress:
        p = record.protocol
        if p.is_ready_to_finalize():
            return Progress.READY_TO_FINALIZE
        if p.is_ready_for_next_round():
            return Progress.READY_FOR_NEXT_ROUND
        return Progress.NONE

    def _progress(self, record: InstanceRecord, progress: Progress) -> None:
        if record.done:
            return
        if progress is Progress.READY_FOR_NEXT_ROUND:
            self._step(record, record.protocol.do_round())
        elif progress is Progress.READY_TO_FINALIZE:
            result = record.protocol.finalize()
            if result.ok:
                record.result = result
                record.finished_at = self.clock()
                record.advance(InstanceState.FINISHED)
                self.events.emit(ev.INSTANCE_FINISHED, node=self.index, instance=record.id.hex(),
                                 scheme=record.request.scheme.value, t=record.finished_at,
                                 latency=record.finished_at - record.started_at)
                self._retire(record)
            else:
                self._fail(record, result.error)

    def _fail(self, record: InstanceRecord, reason: str) -> None:
        record.error = reason
        record.finished_at = self.clock()
        record.advance(InstanceState.FAILED)
        self.events.emit(ev.INSTANCE_FAILED, node=self.index, instance=record.id.hex(),
                         scheme=record.request.scheme.value, t=record.finished_at, reason=reason)
        self._retire(record)

    def _retire(self, record: InstanceRecord) -> None:
        with self._lock:
            self._finished[record.id] = record.finished_at
            while len(self._finished) > self.config.max_retained:
                old, _ = self._finished.popitem(last=False)
                self._records.pop(old, None)
                self.retired += 1

    def _expire(self) -> None:
        horizon = self.clock() - self.config.retention_s
        while self._finished:
            old, at = next(iter(self._finished.items()))
            if at > horizon:
                break
            self._finished.popitem(last=False)
            self._records.pop(old, None)
            self.retired += 1

    def _buffer(self, m: ProtocolMessage) -> None:
        self._pending.setdefault(m.instance_id, []).append(m)
        self._pending_count += 1
        while self._pending_count > self.config.pending_capacity:
            iid, queue = next(iter(self._pending.items()))
            queue.pop(0)
            self._pending_count -= 1
            self.pending_evicted += 1
            if not queue:
                del self._pending[iid]
            self.events.emit(ev.PENDING_EVICTED, node=self.index, instance=iid.hex())

    def pending_size(self) -> int:
        with self._lock:
            return self._pending_count

    def _drop(self, reason: str) -> None:
        self.dropped += 1
        self.events.emit(ev.MESSAGE_DROPPED, node=self.index, reason=reason, t=self.clock())

    def _charge(self, scheme: SchemeId, op: str, count: int = 1) -> None:
        if self.meter:
            for _ in range(count):
                self.meter(scheme, op)

    # -- control messages ----------------------------------------------------------------

    def _send_control(self, body: dict, iid: bytes) -> None:
        self.send(ProtocolMessage(iid, self.index, CONTROL_ROUND, Channel.P2P, canonical_json(body)))

    def _on_control(self, m: ProtocolMessage) -> None:
        try:
            body = json.loads(m.payload)
            kind = body["type"]
        except (ValueError, KeyError, TypeError):
            self._drop("undecodable control message")
            return
        if kind == "request":
            try:
                request = ThresholdRequest.from_dict(body["request"])
                self.start_instance(request, relay=False)
            except Exception as exc:  # a peer's relay must never break dispatch
                self._drop(f"relayed request rejected: {exc}")
        elif kind == "precompute":
            try:
                key_id, party = str(body["key_id"]), int(body["party"])
                if party != m.sender:
                    raise MalformedError("commitments relayed for another party")
                table = self._commitments.setdefault(key_id, {})
                for slot, data in body["slots"]:
                    c = decode_commitment(unb64(data))
                    if c.index != party:
                        raise MalformedError("commitment index mismatch")
                    table.setdefault(int(slot), {})[party] = c
            except (MalformedError, ValueError, KeyError, TypeError) as exc:
                self._drop(f"bad precompute batch: {exc}")
        else:
            self._drop(f"unknown control message {kind!r}")
