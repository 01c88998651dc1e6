"""Value types shared by every scheme."""

from __future__ import annotations

import base64
import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from ..groups.hashing import tagged_hash


class SchemeKind(str, enum.Enum):
    CIPHER = "cipher"
    SIGNATURE = "signature"
    RANDOMNESS = "randomness"


class SchemeId(str, enum.Enum):
    SG02 = "SG02"
    BZ03 = "BZ03"
    SH00 = "SH00"
    KG20 = "KG20"
    BLS04 = "BLS04"
    CKS05 = "CKS05"

    @property
    def kind(self) -> SchemeKind:
        return _KIND[self]

    @property
    def group(self) -> str:
        return _GROUP[self]

    @property
    def interactive(self) -> bool:
        return self is SchemeId.KG20

    @property
    def deterministic(self) -> bool:
        """Whether the combined output is independent of the share subset and randomness."""
        return self in (SchemeId.SH00, SchemeId.BLS04, SchemeId.CKS05)

    @classmethod
    def parse(cls, value: "str | SchemeId") -> "SchemeId":
        try:
            return cls(str(value.value if isinstance(value, SchemeId) else value).upper())
        except ValueError:
            from .errors import UnsupportedSchemeError

            raise UnsupportedSchemeError(f"unknown scheme {value!r}") from None


_KIND = {
    SchemeId.SG02: SchemeKind.CIPHER,
    SchemeId.BZ03: SchemeKind.CIPHER,
    SchemeId.SH00: SchemeKind.SIGNATURE,
    SchemeId.KG20: SchemeKind.SIGNATURE,
    SchemeId.BLS04: SchemeKind.SIGNATURE,
    SchemeId.CKS05: SchemeKind.RANDOMNESS,
}
_GROUP = {
    SchemeId.SG02: "ed25519",
    SchemeId.BZ03: "bn254",
    SchemeId.SH00: "rsa",
    SchemeId.KG20: "ed25519",
    SchemeId.BLS04: "bn254",
    SchemeId.CKS05: "ed25519",
}


@dataclass(frozen=True)
class ThresholdParams:
    """``t + 1`` out of ``n``: any t+1 parties can act, any t learn nothing."""

    n: int
    t: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.t, int)):
            raise TypeError("n and t must be integers")
        if self.t < 0 or self.t + 1 > self.n:
            raise ValueError(f"need 1 <= t+1 <= n, got n={self.n}, t={self.t}")

    @property
    def quorum(self) -> int:
        return self.t + 1

    @property
    def indices(self) -> range:
        return range(1, self.n + 1)

    @classmethod
    def bft(cls, t: int) -> "ThresholdParams":
        return cls(3 * t + 1, t)


@dataclass(frozen=True, eq=False)
class PublicKeyMaterial:
    scheme: SchemeId
    params: ThresholdParams
    group_public_key: Any
    verification_keys: tuple
    aux: dict = field(default_factory=dict)
    key_id: str = "default"

    def __post_init__(self):
        if len(self.verification_keys) != self.params.n:
            raise ValueError("one verification key per party is required")

    def verification_key(self, index: int):
        if not 1 <= index <= self.params.n:
            raise ValueError(f"party index {index} outside 1..{self.params.n}")
        return self.verification_keys[index - 1]

    @cached_property
    def fingerprint(self) -> bytes:
        from . import registry

        return tagged_hash(b"quorumcrypt/pk-fingerprint", canonical_json(registry.get(self.scheme).public_to_dict(self)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PublicKeyMaterial) and self.fingerprint == other.fingerprint

    def __hash__(self) -> int:
        return hash(self.fingerprint)


@dataclass(frozen=True, eq=False)
class KeyShare:
    scheme: SchemeId
    index: int
    secret: Any
    public: PublicKeyMaterial

    def __post_init__(self):
        if not 1 <= self.index <= self.public.params.n:
            raise ValueError("share index outside 1..n")

    @property
    def params(self) -> ThresholdParams:
        return self.public.params

    def __repr__(self) -> str:  # never print secrets
        return f"KeyShare({self.scheme.value}, index={self.index})"


@dataclass(frozen=True)
class DleqProof:
    """Fiat-Shamir proof that two group elements share a discrete logarithm."""

    challenge: int
    response: int


@dataclass(frozen=True)
class Ciphertext:
    scheme: SchemeId
    label: bytes
    encapsulation: tuple
    proof: tuple
    payload: bytes


@dataclass(frozen=True)
class PartialResult:
    """A decryption, signature or coin share from one party."""

    scheme: SchemeId
    binding: bytes
    index: int
    value: Any
    proof: Any = None


@dataclass(frozen=True)
class FrostNonceCommitment:
    index: int
    hiding: Any
    binding: Any


@dataclass(frozen=True)
class FrostSigningRequest:
    """What a FROST share is computed over: the message and the signing set's commitments."""

    message: bytes
    commitments: tuple  # FrostNonceCommitment sorted by index

    @property
    def signing_set(self) -> tuple[int, ...]:
        return tuple(c.index for c in self.commitments)


@dataclass(frozen=True)
class BlsSignature:
    point: Any


@dataclass(frozen=True)
class SchnorrSignature:
    commitment: Any
    response: int


@dataclass(frozen=True)
class RsaSignature:
    value: int


@dataclass(frozen=True)
class CoinValue:
    value: bytes
    element: Any = None
    shares: tuple = ()


# -- canonical JSON dialect used for key files, ciphertexts and wire payloads --

def b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def unb64(text: str) -> bytes:
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except (ValueError, UnicodeError) as exc:
        from .errors import MalformedError

        raise MalformedError("bad base64 field") from exc


def canonical_json(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def int_to_bytes(value: int, length: int | None = None) -> bytes:
    if length is None:
        length = max(1, (value.bit_length() + 7) // 8)
    return value.to_bytes(length, "big")


def bytes_to_int(data: bytes) -> int:
    return int.from_bytes(data, "big")
