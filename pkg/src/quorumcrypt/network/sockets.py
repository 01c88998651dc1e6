"""All-to-all TCP transport.

Every frame is a 4-byte big-endian length followed by an envelope.  Each node
keeps one outgoing connection per peer, fed by a bounded queue; a failed
write reconnects and retries a bounded number of times before the frame is
dropped.  Total-order broadcast uses the lowest-index node as sequencer.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
import struct

from ..protocols.messages import DecodeError, ProtocolMessage
from .auth import AuthKeys
from .config import NetConfig, Peer
from .envelope import AuthenticationError, Envelope, EnvelopeKind
from .transport import Transport

log = logging.getLogger("quorumcrypt.network")

LENGTH = struct.Struct(">I")
MAX_FRAME = 64 * 1024 * 1024
SEQUENCER = 1


async def read_frame(reader: asyncio.StreamReader) -> bytes:
    size = LENGTH.unpack(await reader.readexactly(LENGTH.size))[0]
    if size > MAX_FRAME:
        raise DecodeError(f"frame of {size} bytes exceeds the limit")
    return await reader.readexactly(size)


def frame(data: bytes) -> bytes:
    return LENGTH.pack(len(data)) + data


class SocketTransport(Transport):
    def __init__(self, config: NetConfig, auth: AuthKeys | None = None, *, queue_bound: int = 4096,
                 retry_limit: int = 20, retry_delay: float = 0.1):
        if config.self_index is None:
            raise ValueError("socket transport needs self_index")
        if config.auth_enabled and auth is None:
            raise ValueError("authentication enabled but no pairwise keys given")
        self.config = config
        self.index = config.self_index
        self.n = config.n
        self.tob_enabled = config.tob_enabled
        self.auth = auth if config.auth_enabled else None
        self.queue_bound = queue_bound
        self.retry_limit = retry_limit
        self.retry_delay = retry_delay
        self.dropped = 0
        self.rejected = 0
        self._queues: dict[int, asyncio.Queue] = {}
        self._tasks: list[asyncio.Task] = []
        self._server: asyncio.base_events.Server | None = None
        self._loop: asyncio.AbstractEventLoop | None = None
        self._tob_seq = 0
        self._tob_next = 0
        self._tob_hold: dict[int, bytes] = {}
        self._conns: set[asyncio.StreamWriter] = set()

    # -- lifecycle ------------------------------------------------------------------

    async def start(self) -> None:
        self._loop = asyncio.get_running_loop()
        host, port = Peer.split(self.config.peer(self.index).address)
        self._server = await asyncio.start_server(self._serve, host, port)
        for p in self.config.peers:
            if p.index != self.index:
                self._queues[p.index] = asyncio.Queue(self.queue_bound)
                self._tasks.append(asyncio.create_task(self._sender(p)))

    async def stop(self) -> None:
        for task in self._tasks:
            task.cancel()
        for task in self._tasks:
            with contextlib.suppress(asyncio.CancelledError, Exception):
                await task
        self._tasks.clear()
        for w in list(self._conns):
            w.close()
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()

    # -- sending --------------------------------------------------------------------------

    def p2p_send(self, dest: int, message: ProtocolMessage) -> None:
        self._check_dest(dest)
        self._send_envelope(dest, Envelope(EnvelopeKind.P2P, self.index, message.encode()))

    def tob_broadcast(self, message: ProtocolMessage) -> None:
        self._check_tob()
        self._send_envelope(SEQUENCER, Envelope(EnvelopeKind.TOB_SUBMIT, self.index, message.encode()))

    def _send_envelope(self, dest: int, env: Envelope) -> None:
        if dest == self.index:
            self._loop.call_soon(self._handle, env)
            return
        key = self.auth.key_for(dest) if self.auth else None
        try:
            self._queues[dest].put_nowait(frame(env.encode(key)))
        except asyncio.QueueFull:
            self.dropped += 1
            log.warning("queue to party %d full; frame dropped", dest)

    async def _sender(self, peer: Peer) -> None:
        queue = self._queues[peer.index]
        host, port = Peer.split(peer.address)
        writer = None
        while True:
            data = await queue.get()
            for attempt in range(self.retry_limit + 1):
                try:
                    if writer is None:
                        _, writer = await asyncio.open_connection(host, port)
                    writer.write(data)
                    await writer.drain()
                    break
                except (OSError, ConnectionError):
                    if writer is not None:
                        writer.close()
                    writer = None
                    await asyncio.sleep(self.retry_delay)
            else:
                self.dropped += 1
                log.warning("party %d unreachable; frame dropped", peer.index)

    # -- receiving -----------------------------------------------------------------------

    async def _serve(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        self._conns.add(writer)
        try:
            while True:
                data = await read_frame(reader)
                try:
                    env = Envelope.decode(data)
                    if self.auth is not None:
                        env.verify(self.auth.key_for(env.hop))
                except (DecodeError, AuthenticationError, ValueError) as exc:
                    self.rejected += 1
                    log.warning("rejected envelope: %s", exc)
                    continue
                self._handle(env)
        except (asyncio.IncompleteReadError, ConnectionError, DecodeError):
            pass
        finally:
            self._conns.discard(writer)
            writer.close()

    def _handle(self, env: Envelope) -> None:
        if env.kind is EnvelopeKind.P2P:
            self._deliver(env.message)
        elif env.kind is EnvelopeKind.TOB_SUBMIT:
            if self.index != SEQUENCER:
                self.rejected += 1
                return
            seq = self._tob_seq
            self._tob_seq += 1
            for j in range(1, self.n + 1):
                self._send_envelope(j, Envelope(EnvelopeKind.TOB_DELIVER, self.index, env.message, seq))
        elif env.kind is EnvelopeKind.TOB_DELIVER:
            if env.hop != SEQUENCER:
                self.rejected += 1
                return
            self._tob_hold[env.seq] = env.message
            while self._tob_next in self._tob_hold:
                self._deliver(self._tob_hold.pop(self._tob_next))
                self._tob_next += 1

    def _deliver(self, data: bytes) -> None:
        if self.receiver is None:
            return
        try:
            self.receiver(data)
        except Exception:  # a handler bug must not kill the connection
            log.exception("receiver failed")
