"""The two communication interfaces every backend offers."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable

from ..protocols.messages import Channel, ProtocolMessage

Receiver = Callable[[bytes], None]


class TransportError(RuntimeError):
    pass


class TobDisabledError(TransportError):
    pass


class UnknownPeerError(TransportError, LookupError):
    pass


class Transport(ABC):
    """P2P and TOB for one node.

    Incoming protocol messages (encoded bytes) go to ``receiver``; TOB messages
    are handed over in delivery order, including the node's own.
    """

    index: int
    n: int
    tob_enabled: bool
    receiver: Receiver | None = None

    def set_receiver(self, receiver: Receiver) -> None:
        self.receiver = receiver

    @abstractmethod
    def p2p_send(self, dest: int, message: ProtocolMessage) -> None: ...

    def broadcast(self, message: ProtocolMessage) -> None:
        """n-1 point-to-point sends."""
        for j in range(1, self.n + 1):
            if j != self.index:
                self.p2p_send(j, message)

    @abstractmethod
    def tob_broadcast(self, message: ProtocolMessage) -> None: ...

    def send(self, message: ProtocolMessage) -> None:
        """Route an outgoing protocol message by its declared channel."""
        if message.channel is Channel.TOB:
            self.tob_broadcast(message)
        elif message.recipients is None:
            self.broadcast(message)
        else:
            for j in message.recipients:
                if j != self.index:
                    self.p2p_send(j, message)

    def _check_dest(self, dest: int) -> None:
        if not 1 <= dest <= self.n:
            raise UnknownPeerError(f"no peer with index {dest}")

    def _check_tob(self) -> None:
        if not self.tob_enabled:
            raise TobDisabledError("total-order broadcast is not enabled")
