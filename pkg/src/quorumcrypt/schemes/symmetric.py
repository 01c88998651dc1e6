"""Hybrid-encryption payload layer: ChaCha20-Poly1305 under a single-use key."""

from __future__ import annotations

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from ..groups.hashing import tagged_hash
from .errors import IntegrityError

KEY_SIZE = 32
NONCE_SIZE = 12
TAG_SIZE = 16


def derive_key(domain_tag: bytes, shared_element: bytes) -> bytes:
    return tagged_hash(domain_tag + b"/kdf", shared_element, size=KEY_SIZE)


def derive_nonce(domain_tag: bytes, encapsulation: bytes) -> bytes:
    # the key is never reused, so a nonce derived from the encapsulation is safe
    return tagged_hash(domain_tag + b"/nonce", encapsulation, size=NONCE_SIZE)


def seal(key: bytes, nonce: bytes, plaintext: bytes, aad: bytes) -> bytes:
    return ChaCha20Poly1305(key).encrypt(nonce, plaintext, aad)


def open_(key: bytes, nonce: bytes, payload: bytes, aad: bytes) -> bytes:
    try:
        return ChaCha20Poly1305(key).decrypt(nonce, payload, aad)
    except InvalidTag:
        raise IntegrityError("payload authentication failed") from None
