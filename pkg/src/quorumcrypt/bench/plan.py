"""Experiment plans (canonical JSON files)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from ..network.config import load_preset
from ..schemes.core import SchemeId, canonical_json

PAYLOAD_SIZES = (256, 1024, 4096)
CAPACITY_DURATION = 60.0
STEADY_DURATION = 300.0


class PlanError(ValueError):
    pass


def doubling_ladder(max_rate: int, start: int = 1) -> list[int]:
    rates, r = [], start
    while r <= max_rate:
        rates.append(r)
        r *= 2
    return rates


@dataclass(frozen=True)
class ExperimentPlan:
    preset: str
    schemes: tuple[str, ...]
    rates: tuple[int, ...] = ()
    duration_s: float = CAPACITY_DURATION
    payload_size: int = 256
    seed: str = "00"
    #: "zero", "measured", or a mapping of op (or "SCHEME/op") to seconds
    compute: str | dict = "zero"
    precompute: bool = False
    tob_enabled: bool | None = None
    crashed: tuple[int, ...] = ()
    rsa_bits: int = 2048
    #: optional constant one-way delay overriding the preset's latency model
    constant_delay_ms: float | None = None
    grace: float = 0.1
    usable_factor: float = 5.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(SchemeId.parse(s).value for s in self.schemes))
        object.__setattr__(self, "crashed", tuple(self.crashed))
        if not self.rates:
            object.__setattr__(self, "rates", tuple(doubling_ladder(self.max_rate)))
        object.__setattr__(self, "rates", tuple(int(r) for r in self.rates))
        self.validate()

    @property
    def max_rate(self) -> int:
        return load_preset(self.preset).max_rate or 1024

    def validate(self) -> None:
        if not self.schemes:
            raise PlanError("plan lists no schemes")
        if self.duration_s <= 0:
            raise PlanError("duration must be positive")
        if self.payload_size not in PAYLOAD_SIZES:
            raise PlanError(f"payload size must be one of {PAYLOAD_SIZES}")
        if not self.rates or self.rates[0] < 1:
            raise PlanError("rate ladder must start at 1 req/s or more")
        for a, b in zip(self.rates, self.rates[1:]):
            if b != 2 * a:
                raise PlanError("rates must double at every step")
        load_preset(self.preset)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schemes"] = list(self.schemes)
        d["rates"] = list(self.rates)
        d["crashed"] = list(self.crashed)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise PlanError(f"unknown plan fields: {', '.join(sorted(unknown))}")
        d = dict(d)
        for key in ("schemes", "rates", "crashed"):
            if key in d:
                d[key] = tuple(d[key])
        try:
            return cls(**d)
        except TypeError as exc:
            raise PlanError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentPlan":
        return cls.from_dict(json.loads(Path(path).read_bytes()))

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(canonical_json(self.to_dict()) + b"\n")

    def with_(self, **changes) -> "ExperimentPlan":
        return replace(self, **changes)
