"""Envelopes: what actually travels between nodes.

Layout (big-endian): kind (u8), flags (u8), hop sender (u16), TOB sequence
number (u64), the encoded ProtocolMessage, then a 32-byte HMAC-SHA256 tag when
flag bit 0 is set.  The tag is keyed with the pairwise key of the hop sender
and the receiver and covers everything before it.
"""

from __future__ import annotations

import enum
import hmac
import struct
from dataclasses import dataclass
from hashlib import sha256

from ..protocols.messages import DecodeError

HEADER = struct.Struct(">BBHQ")
TAG_SIZE = 32
FLAG_AUTH = 0x01


class EnvelopeKind(enum.IntEnum):
    P2P = 0
    TOB_SUBMIT = 1
    TOB_DELIVER = 2


class AuthenticationError(ValueError):
    pass


@dataclass(frozen=True)
class Envelope:
    kind: EnvelopeKind
    hop: int
    message: bytes
    seq: int = 0
    tag: bytes | None = None

    def encode(self, key: bytes | None = None) -> bytes:
        flags = FLAG_AUTH if key is not None else 0
        body = HEADER.pack(int(self.kind), flags, self.hop, self.seq) + self.message
        if key is None:
            return body
        return body + hmac.new(key, body, sha256).digest()

    @classmethod
    def decode(cls, data: bytes) -> "Envelope":
        if len(data) < HEADER.size:
            raise DecodeError("truncated envelope")
        kind, flags, hop, seq = HEADER.unpack_from(data)
        try:
            kind = EnvelopeKind(kind)
        except ValueError:
            raise DecodeError(f"unknown envelope kind {kind}") from None
        tag = None
        end = len(data)
        if flags & FLAG_AUTH:
            if len(data) < HEADER.size + TAG_SIZE:
                raise DecodeError("truncated authentication tag")
            end -= TAG_SIZE
            tag = bytes(data[end:])
        return cls(kind, hop, bytes(data[HEADER.size:end]), seq, tag)

    def verify(self, key: bytes) -> None:
        if self.tag is None:
            raise AuthenticationError("envelope carries no authentication tag")
        body = HEADER.pack(int(self.kind), FLAG_AUTH, self.hop, self.seq) + self.message
        if not hmac.compare_digest(hmac.new(key, body, sha256).digest(), self.tag):
            raise AuthenticationError(f"bad authentication tag from party {self.hop}")
