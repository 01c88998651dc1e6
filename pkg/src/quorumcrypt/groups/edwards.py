"""The prime-order subgroup of edwards25519.

Point arithmetic is delegated to libsodium through PyNaCl.  libsodium refuses
the identity element in several calls, so the identity is handled here.
"""

from __future__ import annotations

import nacl.bindings as sodium
import nacl.exceptions

from .hashing import tagged_hash

ORDER = 2**252 + 27742317777372353535851937790883648493
_IDENTITY = (1).to_bytes(32, "little")


class EdwardsPoint:
    """Immutable element of the edwards25519 prime-order subgroup."""

    __slots__ = ("_enc",)

    def __init__(self, encoding: bytes):
        self._enc = encoding

    @property
    def group(self) -> "Ed25519Group":
        return ED25519

    def is_identity(self) -> bool:
        return self._enc == _IDENTITY

    def __add__(self, other: "EdwardsPoint") -> "EdwardsPoint":
        if not isinstance(other, EdwardsPoint):
            return NotImplemented
        if self.is_identity():
            return other
        if other.is_identity():
            return self
        return EdwardsPoint(sodium.crypto_core_ed25519_add(self._enc, other._enc))

    def __sub__(self, other: "EdwardsPoint") -> "EdwardsPoint":
        if not isinstance(other, EdwardsPoint):
            return NotImplemented
        if other.is_identity():
            return self
        if self.is_identity():
            return -other
        return EdwardsPoint(sodium.crypto_core_ed25519_sub(self._enc, other._enc))

    def __neg__(self) -> "EdwardsPoint":
        if self.is_identity():
            return self
        return EdwardsPoint(sodium.crypto_core_ed25519_sub(_IDENTITY, self._enc))

    def __mul__(self, k: int) -> "EdwardsPoint":
        if not isinstance(k, int):
            return NotImplemented
        k %= ORDER
        if k == 0 or self.is_identity():
            return ED25519.identity()
        return EdwardsPoint(sodium.crypto_scalarmult_ed25519_noclamp(k.to_bytes(32, "little"), self._enc))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, EdwardsPoint) and self._enc == other._enc

    def __hash__(self) -> int:
        return hash(("ed25519", self._enc))

    def __bytes__(self) -> bytes:
        return self._enc

    def encode(self) -> bytes:
        return self._enc

    def __repr__(self) -> str:
        return f"EdwardsPoint({self._enc.hex()[:16]}...)"


class Ed25519Group:
    name = "ed25519"
    order = ORDER
    element_size = 32
    scalar_size = 32

    def __init__(self):
        self._g = EdwardsPoint(sodium.crypto_scalarmult_ed25519_base_noclamp((1).to_bytes(32, "little")))

    def generator(self) -> EdwardsPoint:
        return self._g

    def identity(self) -> EdwardsPoint:
        return EdwardsPoint(_IDENTITY)

    def base_mul(self, k: int) -> EdwardsPoint:
        k %= ORDER
        if k == 0:
            return self.identity()
        return EdwardsPoint(sodium.crypto_scalarmult_ed25519_base_noclamp(k.to_bytes(32, "little")))

    def decode(self, data: bytes) -> EdwardsPoint:
        """Parse a compressed point, insisting on prime-order subgroup membership."""
        data = bytes(data)
        if len(data) != 32:
            raise ValueError("edwards25519 points are 32 bytes")
        if data == _IDENTITY:
            return self.identity()
        if not sodium.crypto_core_ed25519_is_valid_point(data):
            raise ValueError("not an element of the edwards25519 prime-order subgroup")
        return EdwardsPoint(data)

    def is_member(self, point: EdwardsPoint) -> bool:
        return point.is_identity() or bool(sodium.crypto_core_ed25519_is_valid_point(point.encode()))

    def hash_to_group(self, domain_tag: bytes, data: bytes) -> EdwardsPoint:
        """Elligator 2 map of a tagged hash, with the cofactor cleared by libsodium."""
        counter = 0
        while True:
            uniform = tagged_hash(domain_tag, b"h2g", counter.to_bytes(4, "big"), data, size=32)
            try:
                point = EdwardsPoint(sodium.crypto_core_ed25519_from_uniform(uniform))
            except nacl.exceptions.RuntimeError:  # pragma: no cover - negligible probability
                point = self.identity()
            if not point.is_identity():
                return point
            counter += 1  # pragma: no cover

    def encode_scalar(self, k: int) -> bytes:
        return (k % ORDER).to_bytes(32, "little")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != 32:
            raise ValueError("scalars are 32 bytes")
        k = int.from_bytes(data, "little")
        if k >= ORDER:
            raise ValueError("non-canonical scalar")
        return k


ED25519 = Ed25519Group()
