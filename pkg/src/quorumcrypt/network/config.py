"""Network configuration: peers, latency model, TOB and authentication flags.

Config files use the same canonical JSON dialect as key files.  Named presets
for the evaluation deployments ship in ``presets/``.
"""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from ..schemes.core import canonical_json


class NetMode(str, enum.Enum):
    SIMULATED = "simulated"
    SOCKETS = "sockets"
    PROXY = "proxy"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DelayDistribution:
    """One-way delay of a link, in milliseconds."""

    kind: str = "constant"  # constant | normal
    mean_ms: float = 0.0
    sigma_ms: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "normal"):
            raise ConfigError(f"unknown delay distribution {self.kind!r}")
        if self.mean_ms < 0 or self.sigma_ms < 0:
            raise ConfigError("latency entries must be non-negative")

    def sample(self, rng: random.Random) -> float:
        """A delay in seconds; normal samples are truncated at zero."""
        if self.kind == "constant" or self.sigma_ms == 0:
            return self.mean_ms / 1000.0
        return max(0.0, rng.gauss(self.mean_ms, self.sigma_ms)) / 1000.0

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "mean_ms": self.mean_ms}
        if self.kind == "normal":
            d["sigma_ms"] = self.sigma_ms
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DelayDistribution":
        return cls(d.get("kind", "constant"), float(d.get("mean_ms", 0.0)), float(d.get("sigma_ms", 0.0)))


@dataclass(frozen=True)
class LatencyModel:
    """Per-pair one-way delays.

    Parties are placed into regions round-robin (party i goes to region
    ``(i-1) % len(regions)``).  Same-region pairs use ``default``; pairs in
    different regions use the matrix entry, with normal jitter of
    ``jitter_fraction`` times the mean.
    """

    default: DelayDistribution = DelayDistribution()
    regions: tuple[str, ...] = ()
    inter_region_ms: dict[tuple[str, str], float] = field(default_factory=dict)
    jitter_fraction: float = 0.0

    @classmethod
    def constant(cls, one_way_ms: float) -> "LatencyModel":
        return cls(DelayDistribution("constant", one_way_ms))

    def region_of(self, index: int) -> str | None:
        return self.regions[(index - 1) % len(self.regions)] if self.regions else None

    def distribution(self, src: int, dst: int) -> DelayDistribution:
        if src == dst:
            return DelayDistribution()
        a, b = self.region_of(src), self.region_of(dst)
        if a is None or a == b:
            return self.default
        mean = self.inter_region_ms.get((a, b), self.inter_region_ms.get((b, a)))
        if mean is None:
            raise ConfigError(f"no latency entry for regions {a}/{b}")
        kind = "normal" if self.jitter_fraction else "constant"
        return DelayDistribution(kind, mean, mean * self.jitter_fraction)

    def sample(self, src: int, dst: int, rng: random.Random) -> float:
        return self.distribution(src, dst).sample(rng)

    def mean_inter_region_ms(self) -> float:
        values = list(self.inter_region_ms.values())
        return sum(values) / len(values) if values else self.default.mean_ms

    def to_dict(self) -> dict:
        d = {"default": self.default.to_dict()}
        if self.regions:
            d["regions"] = list(self.regions)
            d["inter_region_ms"] = {f"{a}/{b}": v for (a, b), v in sorted(self.inter_region_ms.items())}
            d["jitter_fraction"] = self.jitter_fraction
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LatencyModel":
        matrix = {}
        for key, value in d.get("inter_region_ms", {}).items():
            a, b = key.split("/")
            if float(value) < 0:
                raise ConfigError("latency entries must be non-negative")
            matrix[(a, b)] = float(value)
        regions = tuple(d.get("regions", ()))
        for a, b in matrix:
            if a not in regions or b not in regions:
                raise ConfigError(f"latency entry {a}/{b} names an unknown region")
        return cls(DelayDistribution.from_dict(d.get("default", {})), regions, matrix,
                   float(d.get("jitter_fraction", 0.0)))


@dataclass(frozen=True)
class Peer:
    index: int
    address: str = ""  # host:port of the peer-to-peer listener
    rpc: str = ""  # host:port of the node's RPC service

    @staticmethod
    def split(address: str) -> tuple[str, int]:
        host, _, port = address.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"bad address {address!r}, expected host:port")
        return host, int(port)


@dataclass(frozen=True)
class NetConfig:
    peers: tuple[Peer, ...]
    self_index: int | None = None
    mode: NetMode = NetMode.SIMULATED
    latency_model: LatencyModel = LatencyModel()
    tob_enabled: bool = False
    tob_latency_ms: float = 0.0
    auth_enabled: bool = False
    name: str = ""
    t: int | None = None
    max_rate: int | None = None
    #: orchestration options passed through to nodes (forward_requests, ...)
    node: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "mode", NetMode(self.mode))
        indices = sorted(p.index for p in self.peers)
        if indices != list(range(1, len(indices) + 1)):
            raise ConfigError("peer indices must be exactly 1..n")
        if self.self_index is not None and self.self_index not in indices:
            raise ConfigError(f"self index {self.self_index} is not among the peers")
        if self.tob_latency_ms < 0:
            raise ConfigError("latency entries must be non-negative")

    @property
    def n(self) -> int:
        return len(self.peers)

    def peer(self, index: int) -> Peer:
        for p in self.peers:
            if p.index == index:
                return p
        raise ConfigError(f"unknown peer {index}")

    def for_node(self, index: int) -> "NetConfig":
        return replace(self, self_index=index)

    def with_latency(self, model: LatencyModel) -> "NetConfig":
        return replace(self, latency_model=model)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "mode": self.mode.value,
            "self_index": self.self_index,
            "peers": [{"index": p.index, "address": p.address, "rpc": p.rpc} for p in self.peers],
            "latency_model": self.latency_model.to_dict(),
            "tob_enabled": self.tob_enabled,
            "tob_latency_ms": self.tob_latency_ms,
            "auth_enabled": self.auth_enabled,
            "node": self.node,
        }
        if self.t is not None:
            d["t"] = self.t
        if self.max_rate is not None:
            d["max_rate"] = self.max_rate
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NetConfig":
        try:
            peers = tuple(Peer(int(p["index"]), p.get("address", ""), p.get("rpc", "")) for p in d["peers"])
            return cls(
                peers=peers,
                self_index=d.get("self_index"),
                mode=NetMode(d.get("mode", "simulated")),
                latency_model=LatencyModel.from_dict(d.get("latency_model", {})),
                tob_enabled=bool(d.get("tob_enabled", False)),
                tob_latency_ms=float(d.get("tob_latency_ms", 0.0)),
                auth_enabled=bool(d.get("auth_enabled", False)),
                name=d.get("name", ""),
                t=d.get("t"),
                max_rate=d.get("max_rate"),
                node=dict(d.get("node", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad network config: {exc}") from exc

    def encode(self) -> bytes:
        return canonical_json(self.to_dict())

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.encode() + b"\n")

    @classmethod
    def load(cls, path: str | Path) -> "NetConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_bytes()))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not JSON") from exc


PRESETS = ("local-7", "global-7", "local-31", "global-31", "local-127", "global-127")


def preset_names() -> list[str]:
    files = resources.files(__package__).joinpath("presets")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> NetConfig:
    path = resources.files(__package__).joinpath("presets").joinpath(f"{name}.json")
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(preset_names())}")
    return NetConfig.from_dict(json.loads(path.read_bytes()))


def loopback_config(n: int, *, base_port: int = 7100, rpc_base_port: int = 8100, host: str = "127.0.0.1",
                    t: int | None = None, **options) -> NetConfig:
    """A socket-mode config for ``n`` nodes on one host."""
    peers = tuple(Peer(i, f"{host}:{base_port + i}", f"{host}:{rpc_base_port + i}") for i in range(1, n + 1))
    return NetConfig(peers, mode=NetMode.SOCKETS, t=t, name=f"loopback-{n}", **options)
