"""Typed threshold requests and content-derived instance identifiers."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

from ..groups.hashing import tagged_hash
from ..schemes import registry
from ..schemes.core import SchemeId, SchemeKind, b64, canonical_json, unb64
from ..schemes.errors import MalformedError, UnsupportedSchemeError


class RequestKind(str, enum.Enum):
    DECRYPT = "decrypt"
    SIGN = "sign"
    COIN = "coin"


_KIND_FOR = {SchemeKind.CIPHER: RequestKind.DECRYPT, SchemeKind.SIGNATURE: RequestKind.SIGN,
             SchemeKind.RANDOMNESS: RequestKind.COIN}


@dataclass(frozen=True)
class ThresholdRequest:
    """What a client asks the network to compute.

    ``payload`` is the encoded ciphertext, the message to sign or the coin name.
    ``signing_set`` and ``slot`` only apply to FROST.
    """

    scheme: SchemeId
    kind: RequestKind
    payload: bytes
    key_id: str = "default"
    signing_set: tuple[int, ...] | None = None
    slot: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeId.parse(self.scheme))
        object.__setattr__(self, "kind", RequestKind(self.kind))
        if _KIND_FOR[self.scheme.kind] is not self.kind:
            raise UnsupportedSchemeError(f"{self.scheme.value} cannot serve {self.kind.value} requests")
        if self.signing_set is not None:
            object.__setattr__(self, "signing_set", tuple(sorted(int(i) for i in self.signing_set)))

    @classmethod
    def decrypt(cls, scheme, ciphertext: bytes, key_id: str = "default") -> "ThresholdRequest":
        return cls(scheme, RequestKind.DECRYPT, bytes(ciphertext), key_id)

    @classmethod
    def sign(cls, scheme, message: bytes, key_id: str = "default", **frost) -> "ThresholdRequest":
        return cls(scheme, RequestKind.SIGN, bytes(message), key_id, **frost)

    @classmethod
    def coin(cls, scheme, name: bytes, key_id: str = "default") -> "ThresholdRequest":
        return cls(scheme, RequestKind.COIN, bytes(name), key_id)

    @property
    def label(self) -> bytes:
        if self.kind is RequestKind.DECRYPT:
            try:
                return self.decoded().label
            except MalformedError:
                return b""
        return b""

    def decoded(self) -> Any:
        """The scheme-level request object (a ``Ciphertext`` for decryption)."""
        if self.kind is RequestKind.DECRYPT:
            return registry.get(self.scheme).ciphertext_from_bytes(self.payload)
        return self.payload

    def instance_id(self) -> bytes:
        extra = b""
        if self.signing_set is not None:
            extra += b"set:" + ",".join(map(str, self.signing_set)).encode()
        if self.slot is not None:
            extra += b"slot:" + str(self.slot).encode()
        return tagged_hash(b"quorumcrypt/instance-id", self.scheme.value.encode(), self.key_id.encode(),
                           self.kind.value.encode(), self.payload, self.label, extra)[:16]

    def to_dict(self) -> dict:
        record = {"scheme": self.scheme.value, "kind": self.kind.value, "payload": b64(self.payload),
                  "key_id": self.key_id}
        if self.signing_set is not None:
            record["signing_set"] = list(self.signing_set)
        if self.slot is not None:
            record["slot"] = self.slot
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "ThresholdRequest":
        try:
            return cls(record["scheme"], record["kind"], unb64(record["payload"]), record.get("key_id", "default"),
                       record.get("signing_set"), record.get("slot"))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedError("bad request record") from exc

    def encode(self) -> bytes:
        return canonical_json(self.to_dict())
