"""The Threshold Round Interface.

An executor drives a protocol like this::

    msg = p.do_round()                 # round one
    ...send msg, feed own msg to p.update()...
    for m in incoming:
        progress = p.update(m)
        if progress is Progress.READY_FOR_NEXT_ROUND:
            send(p.do_round())
        elif progress is Progress.READY_TO_FINALIZE:
            result = p.finalize()
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from ..schemes.core import KeyShare, SchemeId
from .messages import Channel, ProtocolMessage


class Progress(enum.Enum):
    NONE = "none"
    READY_FOR_NEXT_ROUND = "ready_for_next_round"
    READY_TO_FINALIZE = "ready_to_finalize"


class ProtocolError(Exception):
    pass


class ProtocolTerminatedError(ProtocolError):
    pass


class ProtocolStateError(ProtocolError):
    pass


class ProtocolAbortError(ProtocolError):
    """A non-robust protocol saw a bad contribution and gave up."""


@dataclass(frozen=True)
class ProtocolResult:
    ok: bool
    value: Any = None
    encoded: bytes = b""
    error: str | None = None


@dataclass
class MessageCounters:
    received: int = 0
    rejected: int = 0
    duplicate: int = 0
    late: int = 0


Meter = Callable[[str], None]


def _no_meter(op: str) -> None:
    pass


class TriProtocol(ABC):
    """Common state of a protocol instance at one node."""

    #: number of rounds the protocol runs
    round_count = 1

    def __init__(self, instance_id: bytes, share: KeyShare, *, meter: Meter = _no_meter):
        self.instance_id = bytes(instance_id)
        self.share = share
        self.meter = meter
        self.current_round = 0
        self.terminated = False
        self.result: ProtocolResult | None = None
        self.counters = MessageCounters()

    @property
    def scheme(self) -> SchemeId:
        return self.share.scheme

    @property
    def index(self) -> int:
        return self.share.index

    @property
    def params(self):
        return self.share.params

    def do_round(self) -> ProtocolMessage | None:
        if self.terminated:
            raise ProtocolTerminatedError("protocol instance already terminated")
        return self._do_round()

    def update(self, message: ProtocolMessage) -> Progress:
        if self.terminated:
            self.counters.late += 1
            return Progress.NONE
        if message.instance_id != self.instance_id:
            raise ProtocolStateError("message belongs to another instance")
        self.counters.received += 1
        self._update(message)
        if self.is_ready_to_finalize():
            return Progress.READY_TO_FINALIZE
        if self.is_ready_for_next_round():
            return Progress.READY_FOR_NEXT_ROUND
        return Progress.NONE

    def finalize(self) -> ProtocolResult:
        if self.terminated:
            return self.result
        if not self.is_ready_to_finalize():
            raise ProtocolStateError("not ready to finalize")
        try:
            self.result = self._finalize()
        except Exception as exc:  # combine/verification failure is a protocol outcome
            self.result = ProtocolResult(False, error=f"{type(exc).__name__}: {exc}")
        self.terminated = True
        return self.result

    def abort(self, reason: str) -> ProtocolResult:
        self.result = ProtocolResult(False, error=reason)
        self.terminated = True
        return self.result

    def _message(self, payload: bytes, channel: Channel = Channel.P2P,
                 recipients: tuple[int, ...] | None = None) -> ProtocolMessage:
        return ProtocolMessage(self.instance_id, self.index, self.current_round, channel, payload, recipients)

    @abstractmethod
    def _do_round(self) -> ProtocolMessage | None: ...

    @abstractmethod
    def _update(self, message: ProtocolMessage) -> None: ...

    @abstractmethod
    def is_ready_to_finalize(self) -> bool: ...

    @abstractmethod
    def is_ready_for_next_round(self) -> bool: ...

    @abstractmethod
    def _finalize(self) -> ProtocolResult: ...
