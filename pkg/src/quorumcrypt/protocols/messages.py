"""Protocol messages and their binary wire encoding.

Header (big-endian): instance id (16 bytes), sender (u16), round (u8),
channel (u8), payload length (u32); then the payload.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field

HEADER = struct.Struct(">16sHBBI")
INSTANCE_ID_SIZE = 16
CONTROL_ROUND = 0


class Channel(enum.IntEnum):
    P2P = 0
    TOB = 1


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolMessage:
    instance_id: bytes
    sender: int
    round: int
    channel: Channel
    payload: bytes
    # delivery hint for the sender's network layer; not part of the wire format
    recipients: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.instance_id) != INSTANCE_ID_SIZE:
            raise ValueError("instance ids are 16 bytes")
        if not 0 <= self.sender < 2**16 or not 0 <= self.round < 2**8:
            raise ValueError("sender or round out of range")

    def encode(self) -> bytes:
        return HEADER.pack(self.instance_id, self.sender, self.round, int(self.channel), len(self.payload)) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "ProtocolMessage":
        if len(data) < HEADER.size:
            raise DecodeError("truncated protocol message header")
        iid, sender, rnd, channel, length = HEADER.unpack_from(data)
        if len(data) != HEADER.size + length:
            raise DecodeError("payload length does not match header")
        try:
            channel = Channel(channel)
        except ValueError:
            raise DecodeError(f"unknown channel {channel}") from None
        return cls(iid, sender, rnd, channel, bytes(data[HEADER.size:]))

    @property
    def is_control(self) -> bool:
        return self.round == CONTROL_ROUND
