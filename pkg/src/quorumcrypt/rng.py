"""Randomness sources.

Everything that samples secrets takes an ``rng`` argument with the
:class:`random.Random` interface.  Production code passes
:func:`system_rng`; tests and the dealer pass a :class:`SeededRng` so runs
are reproducible.
"""

from __future__ import annotations

import hashlib
import random


class SeededRng(random.Random):
    """Deterministic generator backed by SHAKE-256 in counter mode.

    Unlike the Mersenne Twister, outputs do not reveal the internal state,
    so a seeded dealer is still fine for test deployments.
    """

    def __init__(self, seed: bytes | str | int = b""):
        self._counter = 0
        super().__init__(0)
        self.seed(seed)

    def seed(self, a=None, version=2):  # noqa: D102 - random.Random API
        if a is None:
            a = b""
        if isinstance(a, int):
            a = a.to_bytes((a.bit_length() + 8) // 8, "big", signed=True)
        elif isinstance(a, str):
            a = a.encode()
        self._key = hashlib.sha256(b"quorumcrypt/rng" + bytes(a)).digest()
        self._counter = 0

    def getstate(self):
        return (self._key, self._counter)

    def setstate(self, state):
        self._key, self._counter = state

    def _block(self, nbytes: int) -> bytes:
        out = hashlib.shake_256(self._key + self._counter.to_bytes(8, "big")).digest(nbytes)
        self._counter += 1
        return out

    def getrandbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        if k == 0:
            return 0
        nbytes = (k + 7) // 8
        return int.from_bytes(self._block(nbytes), "big") >> (nbytes * 8 - k)

    def random(self) -> float:
        return self.getrandbits(53) / (1 << 53)

    def randbytes(self, n: int) -> bytes:
        return self._block(n) if n else b""

    def fork(self, label: bytes | str) -> "SeededRng":
        """Independent child stream, deterministic in (parent seed, label)."""
        if isinstance(label, str):
            label = label.encode()
        child = SeededRng()
        child._key = hashlib.sha256(self._key + b"/fork/" + label).digest()
        return child


def system_rng() -> random.SystemRandom:
    return random.SystemRandom()


def make_rng(seed: bytes | str | int | None) -> random.Random:
    return system_rng() if seed is None else SeededRng(seed)
