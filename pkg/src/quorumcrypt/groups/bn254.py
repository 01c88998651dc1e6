"""The 254-bit Barreto-Naehrig pairing groups, backed by the mcl library.

``G1`` and ``G2`` are additive groups of prime order ``ORDER``; ``GT`` is the
multiplicative target group.  Scalars are plain Python ints.
"""

from __future__ import annotations

from ctypes import create_string_buffer

from mclbn256 import Fr, G1, G2, GT
from mclbn256.mclbn256 import lib

from .hashing import tagged_hash

ORDER = 0x2523648240000001BA344D8000000007FF9F800000000010A10000000000000D


def _fr(k: int) -> Fr:
    k %= ORDER
    return Fr(k) if k else Fr(0)


class _PairingPoint:
    __slots__ = ("_p",)
    _raw = None  # mcl class
    _size = 0
    _tag = ""

    def __init__(self, raw):
        self._p = raw

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._p.add(other._p))

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self._p.sub(other._p))

    def __neg__(self):
        return type(self)(self._p.neg())

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return type(self)(self._p.mul(_fr(k)))

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and self._p.equals(other._p)

    def __hash__(self) -> int:
        return hash((self._tag, self.encode()))

    def is_identity(self) -> bool:
        return bool(self._p.zero())

    def encode(self) -> bytes:
        return bytes(self._p.serialize())

    __bytes__ = encode

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.encode().hex()[:16]}...)"


class G1Point(_PairingPoint):
    __slots__ = ()
    _tag = "bn254-g1"
    _size = 32


class G2Point(_PairingPoint):
    __slots__ = ()
    _tag = "bn254-g2"
    _size = 64


class GTElement:
    """Element of the pairing target group, written multiplicatively."""

    __slots__ = ("_e",)

    def __init__(self, raw: GT):
        self._e = raw

    def __mul__(self, other: "GTElement") -> "GTElement":
        return GTElement(self._e.mul(other._e))

    def __truediv__(self, other: "GTElement") -> "GTElement":
        return GTElement(self._e.div(other._e))

    def __pow__(self, k: int) -> "GTElement":
        return GTElement(self._e.pow(_fr(k)))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GTElement) and self._e.equals(other._e)

    def __hash__(self) -> int:
        return hash(self.encode())

    def encode(self) -> bytes:
        return bytes(self._e.serialize())


class _Source:
    """One of the two pairing source groups, with the common group interface."""

    order = ORDER
    scalar_size = 32

    def __init__(self, name: str, point_cls, raw_cls, base, hash_fn):
        self.name = name
        self._cls = point_cls
        self._raw = raw_cls
        self._g = point_cls(base)
        self._hash_fn = hash_fn
        self.element_size = point_cls._size

    def generator(self):
        return self._g

    def identity(self):
        return self._cls(self._raw())

    def base_mul(self, k: int):
        return self._g * k

    def decode(self, data: bytes):
        data = bytes(data)
        if len(data) != self.element_size:
            raise ValueError(f"{self.name} points are {self.element_size} bytes")
        try:
            raw = self._raw.deserialize(data)
        except ValueError as exc:
            raise ValueError(f"invalid {self.name} encoding") from exc
        point = self._cls(raw)
        if point.encode() != data or not (raw.zero() or (raw.valid() and raw.valid_order())):
            raise ValueError(f"not an element of {self.name}")
        return point

    def is_member(self, point) -> bool:
        raw = point._p
        return bool(raw.zero() or (raw.valid() and raw.valid_order()))

    def hash_to_group(self, domain_tag: bytes, data: bytes):
        digest = tagged_hash(domain_tag, b"h2g", data, size=64)
        raw = self._raw()
        if self._hash_fn(raw, create_string_buffer(digest, len(digest)), len(digest)) != 0:
            raise ValueError("mcl hash-and-map failed")  # pragma: no cover
        return self._cls(raw)

    def encode_scalar(self, k: int) -> bytes:
        return (k % ORDER).to_bytes(32, "little")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != 32:
            raise ValueError("scalars are 32 bytes")
        k = int.from_bytes(data, "little")
        if k >= ORDER:
            raise ValueError("non-canonical scalar")
        return k


BN254_G1 = _Source("bn254-g1", G1Point, G1, G1.base_point(), lambda raw, buf, n: lib.mclBnG1_hashAndMapTo(raw.d, buf, n))
BN254_G2 = _Source("bn254-g2", G2Point, G2, G2.base_point(), lambda raw, buf, n: lib.mclBnG2_hashAndMapTo(raw.d2, buf, n))


def pairing(p: G1Point, q: G2Point) -> GTElement:
    return GTElement(p._p.pairing(q._p))


def pairings_equal(p1: G1Point, q1: G2Point, p2: G1Point, q2: G2Point) -> bool:
    """``e(p1, q1) == e(p2, q2)``."""
    return pairing(p1, q1) == pairing(p2, q2)


class PairingEngine:
    """Bundles the generators and the bilinear map."""

    order = ORDER
    g1 = BN254_G1
    g2 = BN254_G2

    @staticmethod
    def pair(p: G1Point, q: G2Point) -> GTElement:
        return pairing(p, q)


BN254 = PairingEngine()
