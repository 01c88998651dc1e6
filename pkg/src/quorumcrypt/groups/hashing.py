"""Domain-separated hashing into scalars and byte strings."""

from __future__ import annotations

import hashlib


def frame(*parts: bytes) -> bytes:
    """Length-prefix each part so concatenations cannot collide."""
    out = bytearray()
    for part in parts:
        out += len(part).to_bytes(8, "big")
        out += part
    return bytes(out)


def tagged_hash(domain_tag: bytes, *parts: bytes, size: int = 32) -> bytes:
    if not domain_tag:
        raise ValueError("domain tag must be non-empty")
    if size <= 64:
        return hashlib.sha512(frame(domain_tag, *parts)).digest()[:size]
    return hashlib.shake_256(frame(domain_tag, *parts)).digest(size)


def hash_to_scalar(order: int, domain_tag: bytes, *parts: bytes) -> int:
    """Wide reduction of a 512-bit hash into ``[0, order)``."""
    digest = tagged_hash(domain_tag, *parts, size=64)
    return int.from_bytes(digest, "little") % order


def expand(domain_tag: bytes, data: bytes, nbytes: int) -> bytes:
    """Counter-mode SHA-512 expansion to ``nbytes`` bytes."""
    out = bytearray()
    counter = 0
    while len(out) < nbytes:
        out += hashlib.sha512(frame(domain_tag, counter.to_bytes(4, "big"), data)).digest()
        counter += 1
    return bytes(out[:nbytes])
