"""Network manager: P2P and TOB over simulated, socket or proxy backends."""

from .auth import AuthKeys, deal_auth_keys, write_auth_files
from .config import (
    PRESETS,
    ConfigError,
    DelayDistribution,
    LatencyModel,
    NetConfig,
    NetMode,
    Peer,
    load_preset,
    loopback_config,
    preset_names,
)
from .envelope import AuthenticationError, Envelope, EnvelopeKind
from .proxy import HostPlatform, LoopbackHost, ProxyTransport
from .simulated import ComputeModel, SimulatedNetwork, SimTransport, run_simulated_clock
from .sockets import SocketTransport
from .transport import TobDisabledError, Transport, TransportError, UnknownPeerError

__all__ = [
    "PRESETS", "AuthKeys", "AuthenticationError", "ComputeModel", "ConfigError", "DelayDistribution", "Envelope",
    "EnvelopeKind", "HostPlatform", "LatencyModel", "LoopbackHost", "NetConfig", "NetMode", "Peer",
    "ProxyTransport", "SimTransport", "SimulatedNetwork", "SocketTransport", "TobDisabledError", "Transport",
    "TransportError", "UnknownPeerError", "deal_auth_keys", "load_preset", "loopback_config", "preset_names",
    "run_simulated_clock", "write_auth_files",
]
