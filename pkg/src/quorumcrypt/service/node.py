"""A node process: network transport, instance manager and RPC service."""

from __future__ import annotations

import asyncio
import logging
import os
from pathlib import Path

from ..network.auth import AuthKeys
from ..network.config import ConfigError, NetConfig, NetMode, Peer
from ..network.sockets import SocketTransport
from ..network.transport import Transport
from ..orchestration import EventLog, InstanceManager, KeyStore, OrchestrationConfig, ThresholdRequest
from ..schemes.core import b64, unb64
from ..schemes.errors import MalformedError
from . import models as m
from .errors import RpcFailure
from .scheme_api import SchemeApi

log = logging.getLogger("quorumcrypt.node")

ENV_LISTEN = "QC_LISTEN"
ENV_LOG_LEVEL = "QC_LOG_LEVEL"

_ORCHESTRATION_KEYS = {"retention_s", "max_retained", "pending_capacity", "forward_requests", "frost_precompute"}


def orchestration_options(config: NetConfig) -> OrchestrationConfig:
    unknown = set(config.node) - _ORCHESTRATION_KEYS - {"log_events"}
    if unknown:
        raise ConfigError(f"unknown node options: {', '.join(sorted(unknown))}")
    options = {k: v for k, v in config.node.items() if k in _ORCHESTRATION_KEYS}
    return OrchestrationConfig(tob_enabled=config.tob_enabled, **options)


class Node:
    def __init__(self, config: NetConfig, keystore: KeyStore, auth: AuthKeys | None = None, *,
                 transport: Transport | None = None):
        if config.self_index is None:
            raise ConfigError("node config needs self_index")
        if keystore.index != config.self_index:
            raise ConfigError("key store belongs to another party")
        self.config = config
        self.index = config.self_index
        self.keystore = keystore
        if transport is None:
            if config.mode is not NetMode.SOCKETS:
                raise ConfigError("a node process needs a sockets-mode config")
            transport = SocketTransport(config, auth)
        self.transport = transport
        self.events = EventLog()
        self.manager = InstanceManager(keystore, transport.send, config=orchestration_options(config),
                                       events=self.events)
        transport.set_receiver(self.manager.dispatch_incoming)
        self.scheme_api = SchemeApi(keystore)
        self.ready = False

    @classmethod
    def from_files(cls, config_path: str | Path, key_dir: str | Path, index: int | None = None) -> "Node":
        config = NetConfig.load(config_path)
        if index is not None:
            config = config.for_node(index)
        if config.self_index is None:
            raise ConfigError(f"{config_path}: self_index missing (or pass an index)")
        keystore = KeyStore.from_directory(key_dir, config.self_index)
        if not keystore.keys():
            raise ConfigError(f"{key_dir}: no key files for party {config.self_index}")
        auth = AuthKeys.load(key_dir, config.self_index) if config.auth_enabled else None
        return cls(config, keystore, auth)

    # -- lifecycle -------------------------------------------------------------------

    async def start(self) -> None:
        start = getattr(self.transport, "start", None)
        if start is not None:
            await start()
        self.ready = True
        log.info("node %d ready with keys %s", self.index, self.key_names())

    async def stop(self) -> None:
        self.ready = False
        stop = getattr(self.transport, "stop", None)
        if stop is not None:
            await stop()

    def rpc_address(self) -> tuple[str, int]:
        listen = os.environ.get(ENV_LISTEN) or self.config.peer(self.index).rpc
        if not listen:
            raise ConfigError("no RPC listen address: set peers[].rpc or QC_LISTEN")
        return Peer.split(listen)

    def key_names(self) -> list[str]:
        return [f"{s.value}/{k}" for s, k in self.keystore.keys()]

    # -- protocol API ------------------------------------------------------------------

    def health(self) -> m.Health:
        return m.Health(status="ready" if self.ready else "starting", index=self.index, n=self.config.n,
                        keys=self.key_names())

    def submit(self, body: m.SubmitRequest) -> m.SubmitResponse:
        try:
            payload = unb64(body.payload)
        except ValueError as exc:
            raise MalformedError("payload is not valid base64") from exc
        request = ThresholdRequest(body.scheme, body.kind, payload, body.key_id,
                                   tuple(body.signing_set) if body.signing_set else None, body.slot)
        return m.SubmitResponse(instance_id=self.manager.start_instance(request).hex())

    def poll(self, instance_id: str) -> m.PollResponse:
        try:
            iid = bytes.fromhex(instance_id)
        except ValueError:
            raise RpcFailure("invalid_request", "instance ids are hex strings") from None
        r = self.manager.poll_result(iid)
        return m.PollResponse(instance_id=instance_id, status=r.status,
                              result=b64(r.result) if r.result is not None else None, error=r.error)


async def serve(node: Node, host: str | None = None, port: int | None = None, log_level: str | None = None) -> None:
    """Run the transport and the RPC server until cancelled."""
    import uvicorn

    from .app import create_app

    if host is None or port is None:
        host, port = node.rpc_address()
    level = (log_level or os.environ.get(ENV_LOG_LEVEL) or "warning").lower()
    await node.start()
    server = uvicorn.Server(uvicorn.Config(create_app(node), host=host, port=port, log_level=level,
                                           lifespan="off"))
    try:
        await server.serve()
    finally:
        await node.stop()


def run_node(config_path, key_dir, index: int | None = None) -> None:
    level = os.environ.get(ENV_LOG_LEVEL, "WARNING").upper()
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    node = Node.from_files(config_path, key_dir, index)
    asyncio.run(serve(node))
