"""Arithmetic substrate: edwards25519, BN254 pairings, safe-prime RSA, hashing."""

from .bn254 import BN254, BN254_G1, BN254_G2, G1Point, G2Point, GTElement, PairingEngine, pairing
from .edwards import ED25519, EdwardsPoint
from .hashing import expand, frame, hash_to_scalar, tagged_hash
from .lagrange import (
    eval_polynomial,
    integer_lagrange_coefficient,
    interpolate_at_zero,
    lagrange_coefficient,
    lagrange_coefficients,
)
from .rsa import RsaModulus, RsaTrapdoor, generate_modulus, generate_safe_prime

GROUPS = {g.name: g for g in (ED25519, BN254_G1, BN254_G2)}


def hash_to_group(group, domain_tag: bytes, data: bytes):
    return group.hash_to_group(domain_tag, data)


__all__ = [
    "BN254", "BN254_G1", "BN254_G2", "ED25519", "GROUPS", "EdwardsPoint", "G1Point", "G2Point",
    "GTElement", "PairingEngine", "RsaModulus", "RsaTrapdoor", "eval_polynomial", "expand", "frame",
    "generate_modulus", "generate_safe_prime", "hash_to_group", "hash_to_scalar",
    "integer_lagrange_coefficient", "interpolate_at_zero", "lagrange_coefficient",
    "lagrange_coefficients", "pairing", "tagged_hash",
]
