"""The cryptographic core: six threshold schemes behind one function API.

=======  ==========  ==========  =============================
Scheme   Kind        Group       Share verification
=======  ==========  ==========  =============================
SG02     cipher      ed25519     DLEQ proof
BZ03     cipher      BN254       pairing equation
SH00     signature   RSA         proof of correct exponent
KG20     signature   ed25519     FROST response check
BLS04    signature   BN254       pairing equation
CKS05    randomness  ed25519     DLEQ proof
=======  ==========  ==========  =============================

The module can be used on its own as a library::

    pk, shares = deal_keys("BLS04", ThresholdParams(4, 1), seed=b"demo")
    parts = [sign_share(s, b"msg") for s in shares[:2]]
    sig = combine(pk, b"msg", parts)
    assert verify_result(pk, b"msg", sig)
"""

from __future__ import annotations

import random
from typing import Any

from ..rng import make_rng, system_rng
from . import registry
from .core import (
    BlsSignature,
    Ciphertext,
    CoinValue,
    DleqProof,
    FrostNonceCommitment,
    FrostSigningRequest,
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    RsaSignature,
    SchemeId,
    SchemeKind,
    SchnorrSignature,
    ThresholdParams,
)
from .errors import (
    DuplicateIndexError,
    InsufficientSharesError,
    IntegrityError,
    InvalidCiphertextError,
    InvalidShareError,
    MalformedError,
    NonceReuseError,
    SigningSetError,
    ThresholdError,
    UnsupportedSchemeError,
)
from .kg20 import FrostNonces, FrostNonceStore


def _require(kind: SchemeKind, scheme: SchemeId) -> None:
    if scheme.kind is not kind:
        raise UnsupportedSchemeError(f"{scheme.value} is a {scheme.kind.value} scheme, not a {kind.value} scheme")


def deal_keys(scheme: SchemeId | str, params: ThresholdParams, rng: random.Random | None = None, *,
              seed: bytes | str | int | None = None, key_id: str = "default", **options):
    """Trusted-dealer setup.  Returns ``(public material, [share_1 .. share_n])``."""
    if rng is None:
        rng = make_rng(seed)
    return registry.get(scheme).deal(params, rng, key_id=key_id, **options)


def encrypt(pk: PublicKeyMaterial, label: bytes, plaintext: bytes, rng: random.Random | None = None) -> Ciphertext:
    _require(SchemeKind.CIPHER, pk.scheme)
    return registry.get(pk.scheme).encrypt(pk, bytes(label), bytes(plaintext), rng or system_rng())


def verify_ciphertext(pk: PublicKeyMaterial, c: Ciphertext) -> bool:
    _require(SchemeKind.CIPHER, pk.scheme)
    return registry.get(pk.scheme).verify_ciphertext(pk, c)


def partial_decrypt(share: KeyShare, c: Ciphertext, rng: random.Random | None = None) -> PartialResult:
    _require(SchemeKind.CIPHER, share.scheme)
    return registry.get(share.scheme).create_share(share, c, rng or system_rng())


def sign_share(share: KeyShare, message: bytes, rng: random.Random | None = None) -> PartialResult:
    if share.scheme not in (SchemeId.SH00, SchemeId.BLS04):
        raise UnsupportedSchemeError(f"{share.scheme.value} has no non-interactive signature shares")
    return registry.get(share.scheme).create_share(share, bytes(message), rng or system_rng())


def coin_share(share: KeyShare, coin_name: bytes, rng: random.Random | None = None) -> PartialResult:
    _require(SchemeKind.RANDOMNESS, share.scheme)
    return registry.get(share.scheme).create_share(share, bytes(coin_name), rng or system_rng())


def frost_round1(share: KeyShare, rng: random.Random | None = None) -> tuple[FrostNonces, FrostNonceCommitment]:
    if share.scheme is not SchemeId.KG20:
        raise UnsupportedSchemeError("round one only exists for KG20")
    return registry.get(SchemeId.KG20).round1(share, rng or system_rng())


def frost_signing_request(pk: PublicKeyMaterial, message: bytes, commitments) -> FrostSigningRequest:
    return registry.get(SchemeId.KG20).signing_request(pk, message, commitments)


def frost_round2(share: KeyShare, message: bytes, signing_set, commitments, own_nonces: FrostNonces) -> PartialResult:
    if share.scheme is not SchemeId.KG20:
        raise UnsupportedSchemeError("round two only exists for KG20")
    scheme = registry.get(SchemeId.KG20)
    request = scheme.signing_request(share.public, message, commitments)
    if set(request.signing_set) != set(signing_set):
        raise SigningSetError("commitments do not cover exactly the signing set")
    return scheme.round2(share, request, own_nonces)


def verify_share(pk: PublicKeyMaterial, request: Any, share: PartialResult) -> bool:
    return registry.get(pk.scheme).verify_share(pk, request, share)


def combine(pk: PublicKeyMaterial, request: Any, shares) -> Any:
    return registry.get(pk.scheme).combine(pk, request, shares)


def verify_result(pk: PublicKeyMaterial, request: Any, result: Any) -> bool:
    return registry.get(pk.scheme).verify_result(pk, request, result)


def request_binding(pk: PublicKeyMaterial, request: Any) -> bytes:
    return registry.get(pk.scheme).binding(pk, request)


__all__ = [
    "BlsSignature", "Ciphertext", "CoinValue", "DleqProof", "DuplicateIndexError", "FrostNonceCommitment",
    "FrostNonceStore", "FrostNonces", "FrostSigningRequest", "InsufficientSharesError", "IntegrityError",
    "InvalidCiphertextError", "InvalidShareError", "KeyShare", "MalformedError", "NonceReuseError",
    "PartialResult", "PublicKeyMaterial", "RsaSignature", "SchemeId", "SchemeKind", "SchnorrSignature",
    "SigningSetError", "ThresholdError", "ThresholdParams", "UnsupportedSchemeError", "coin_share", "combine",
    "deal_keys", "encrypt", "frost_round1", "frost_round2", "frost_signing_request", "partial_decrypt",
    "registry", "request_binding", "sign_share", "verify_ciphertext", "verify_result", "verify_share",
]
