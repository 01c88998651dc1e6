"""RSA moduli built from safe primes, as Shoup's threshold RSA requires."""

from __future__ import annotations

import random
from dataclasses import dataclass

import gmpy2

ALLOWED_BITS = (512, 1024, 2048, 4096)
_SIEVE = [p for p in range(3, 4000) if gmpy2.is_prime(p)]


def is_probable_prime(n: int, rounds: int = 32) -> bool:
    return bool(gmpy2.is_prime(n, rounds))


def generate_safe_prime(bits: int, rng: random.Random) -> int:
    """Return p = 2p' + 1 with both p and p' prime and p exactly ``bits`` long."""
    if bits < 16:
        raise ValueError("safe primes below 16 bits are not supported")
    while True:
        # top two bits set so that the product of two such primes has 2*bits bits
        q = rng.getrandbits(bits - 1) | (0b11 << (bits - 3)) | 1
        ok = True
        for s in _SIEVE:
            r = q % s
            if r == 0 or (2 * r + 1) % s == 0:
                ok = q == s
                break
        if not ok:
            continue
        if is_probable_prime(q) and is_probable_prime(2 * q + 1):
            return 2 * q + 1


@dataclass(frozen=True)
class RsaModulus:
    """Public part of an RSA modulus with its public exponent."""

    n_modulus: int
    bit_length: int
    public_exponent: int

    def __post_init__(self):
        if self.n_modulus.bit_length() != self.bit_length:
            raise ValueError("declared bit length does not match the modulus")
        if not is_probable_prime(self.public_exponent):
            raise ValueError("public exponent must be prime")

    @property
    def byte_length(self) -> int:
        return (self.bit_length + 7) // 8


@dataclass(frozen=True)
class RsaTrapdoor:
    """Dealer-only factorisation data; p = 2p'+1, q = 2q'+1."""

    p: int
    q: int

    @property
    def p_prime(self) -> int:
        return (self.p - 1) // 2

    @property
    def q_prime(self) -> int:
        return (self.q - 1) // 2

    @property
    def m(self) -> int:
        """Order of the subgroup of squares of Z_N^*."""
        return self.p_prime * self.q_prime


def generate_modulus(bits: int, rng: random.Random, public_exponent: int = 65537,
                     allow_test_sizes: bool = True) -> tuple[RsaModulus, RsaTrapdoor]:
    if bits not in ALLOWED_BITS:
        raise ValueError(f"modulus size must be one of {ALLOWED_BITS}")
    if bits == 512 and not allow_test_sizes:
        raise ValueError("512-bit moduli are for test deployments only")
    while True:
        p = generate_safe_prime(bits // 2, rng)
        q = generate_safe_prime(bits // 2, rng)
        if p == q:
            continue
        n = p * q
        if n.bit_length() != bits:
            continue
        trap = RsaTrapdoor(p, q)
        if trap.m % public_exponent == 0:
            continue
        return RsaModulus(n, bits, public_exponent), trap
