"""Proxy backend: hands P2P and TOB traffic to a host platform.

Only a loopback host ships here; a real deployment would implement
``HostPlatform`` on top of the platform's own messaging and ordering.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import deque
from collections.abc import Callable

from ..protocols.messages import ProtocolMessage
from .transport import Transport


class HostPlatform(ABC):
    @abstractmethod
    def register(self, index: int, on_p2p: Callable[[bytes], None], on_tob: Callable[[bytes], None]) -> None: ...

    @abstractmethod
    def p2p(self, sender: int, dest: int, data: bytes) -> None: ...

    @abstractmethod
    def tob_input(self, sender: int, data: bytes) -> None: ...


class LoopbackHost(HostPlatform):
    """Everything in one process; ``pump`` delivers queued traffic in FIFO order."""

    def __init__(self):
        self.handlers: dict[int, tuple[Callable, Callable]] = {}
        self.queue: deque[tuple[Callable, bytes]] = deque()
        self.tob_order: list[bytes] = []

    def register(self, index, on_p2p, on_tob) -> None:
        self.handlers[index] = (on_p2p, on_tob)

    def p2p(self, sender: int, dest: int, data: bytes) -> None:
        self.queue.append((self.handlers[dest][0], data))

    def tob_input(self, sender: int, data: bytes) -> None:
        self.tob_order.append(data)
        for index in sorted(self.handlers):
            self.queue.append((self.handlers[index][1], data))

    def pump(self, limit: int | None = None) -> int:
        done = 0
        while self.queue and (limit is None or done < limit):
            handler, data = self.queue.popleft()
            handler(data)
            done += 1
        return done


class ProxyTransport(Transport):
    def __init__(self, host: HostPlatform, index: int, n: int, tob_enabled: bool = True):
        self.host = host
        self.index = index
        self.n = n
        self.tob_enabled = tob_enabled
        host.register(index, self._on_message, self._on_message)

    def _on_message(self, data: bytes) -> None:
        if self.receiver:
            self.receiver(data)

    def p2p_send(self, dest: int, message: ProtocolMessage) -> None:
        self._check_dest(dest)
        self.host.p2p(self.index, dest, message.encode())

    def tob_broadcast(self, message: ProtocolMessage) -> None:
        self._check_tob()
        self.host.tob_input(self.index, message.encode())
