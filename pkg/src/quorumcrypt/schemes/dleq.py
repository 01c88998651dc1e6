"""Non-interactive Chaum-Pedersen proofs of discrete-log equality.

A proof for ``(g, A, h, B)`` convinces the verifier that ``A = x*g`` and
``B = x*h`` for the same ``x``.  The challenge hashes a caller-supplied
context (the request binding) so a proof cannot be replayed elsewhere.
"""

from __future__ import annotations

import random

from ..groups.hashing import hash_to_scalar
from .core import DleqProof


def _challenge(group, tag: bytes, context: bytes, g, a, h, b, commit_g, commit_h) -> int:
    return hash_to_scalar(
        group.order, tag + b"/dleq", context,
        g.encode(), a.encode(), h.encode(), b.encode(), commit_g.encode(), commit_h.encode(),
    )


def prove(group, tag: bytes, context: bytes, secret: int, g, a, h, b, rng: random.Random) -> DleqProof:
    # hedged nonce: safe even if the rng is weak or replayed
    w = hash_to_scalar(group.order, tag + b"/dleq-nonce", group.encode_scalar(secret), context,
                       b.encode(), rng.randbytes(32))
    c = _challenge(group, tag, context, g, a, h, b, g * w, h * w)
    return DleqProof(c, (w + c * secret) % group.order)


def verify(group, tag: bytes, context: bytes, g, a, h, b, proof: DleqProof) -> bool:
    if not (0 <= proof.challenge < group.order and 0 <= proof.response < group.order):
        return False
    commit_g = g * proof.response - a * proof.challenge
    commit_h = h * proof.response - b * proof.challenge
    return proof.challenge == _challenge(group, tag, context, g, a, h, b, commit_g, commit_h)


def encode(group, proof: DleqProof) -> bytes:
    return group.encode_scalar(proof.challenge) + group.encode_scalar(proof.response)


def decode(group, data: bytes) -> DleqProof:
    size = group.scalar_size
    if len(data) != 2 * size:
        raise ValueError("bad DLEQ proof length")
    return DleqProof(group.decode_scalar(data[:size]), group.decode_scalar(data[size:]))
