"""Threshold BLS signatures on BN254 (signatures in G1, keys in G2)."""

from __future__ import annotations

import random

from ..groups.bn254 import BN254_G1, BN254_G2, pairing
from ..groups.lagrange import lagrange_coefficients
from .base import DlogScheme, decode_element
from .core import BlsSignature, KeyShare, PartialResult, PublicKeyMaterial, SchemeId, ThresholdParams, b64, unb64
from .errors import MalformedError

TAG = b"quorumcrypt/BLS04"


def message_point(message: bytes):
    return BN254_G1.hash_to_group(TAG + b"/message", message)


def bls_verify(public_key, message: bytes, signature_point) -> bool:
    """Plain single-signer BLS check ``e(sig, P2) == e(H(m), pk)``."""
    return pairing(signature_point, BN254_G2.generator()) == pairing(message_point(message), public_key)


class Bls04(DlogScheme):
    id = SchemeId.BLS04
    tag = TAG
    group = BN254_G2

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default", **options):
        secret, xs = self._deal_scalars(params, rng)
        p2 = BN254_G2.generator()
        pk = PublicKeyMaterial(self.id, params, p2 * secret, tuple(p2 * x for x in xs), {}, key_id)
        return pk, [KeyShare(self.id, i, x, pk) for i, x in zip(params.indices, xs)]

    def request_bytes(self, message: bytes) -> bytes:
        return bytes(message)

    def create_share(self, share: KeyShare, message: bytes, rng: random.Random | None = None) -> PartialResult:
        return PartialResult(self.id, self.binding(share.public, message), share.index, message_point(message) * share.secret)

    def _verify_share(self, pk, message: bytes, p: PartialResult) -> bool:
        return bls_verify(pk.verification_key(p.index), message, p.value)

    def _combine(self, pk, message: bytes, partials) -> BlsSignature:
        lam = lagrange_coefficients([p.index for p in partials], BN254_G1.order)
        sig = BN254_G1.identity()
        for p in partials:
            sig = sig + p.value * lam[p.index]
        return BlsSignature(sig)

    def verify_result(self, pk, message: bytes, result) -> bool:
        return isinstance(result, BlsSignature) and bls_verify(pk.group_public_key, message, result.point)

    def public_to_dict(self, pk):
        d = self._base_public_dict(pk)
        d["public_key"] = b64(pk.group_public_key.encode())
        d["verification_keys"] = [b64(v.encode()) for v in pk.verification_keys]
        d["aux"] = {}
        return d

    def public_from_dict(self, record):
        params = self._params_from(record)
        try:
            return PublicKeyMaterial(
                self.id, params, decode_element(BN254_G2, unb64(record["public_key"])),
                self._decode_vks(BN254_G2, record, params), {}, record.get("key_id", "default"),
            )
        except KeyError as exc:
            raise MalformedError(f"missing field {exc}") from exc

    def value_to_bytes(self, value) -> bytes:
        return value.encode()

    def value_from_bytes(self, data, pk=None):
        return decode_element(BN254_G1, data)

    def result_to_bytes(self, result: BlsSignature, pk=None) -> bytes:
        return result.point.encode()

    def result_from_bytes(self, data: bytes, pk=None) -> BlsSignature:
        return BlsSignature(decode_element(BN254_G1, data))
