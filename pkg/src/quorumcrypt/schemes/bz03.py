"""Baek-Zheng threshold encryption on BN254, adapted to an asymmetric pairing.

Public key ``Y1 = x*P1`` and ``Y2 = x*P2``; verification keys ``x_i*P2``.
A ciphertext holds ``U = r*P1``, the tag ``W = r*H(U, payload, label)`` in G2
and the AEAD payload keyed from ``r*Y1``.  Validity is the pairing check
``e(U, H) == e(P1, W)``, and a decryption share ``x_i*U`` is checked with
``e(U_i, P2) == e(U, Y2_i)``; no proofs are needed.
"""

from __future__ import annotations

import json
import random

from ..groups.bn254 import BN254_G1, BN254_G2, pairing
from ..groups.lagrange import lagrange_coefficients
from . import symmetric
from .base import DlogScheme, decode_element
from .core import (
    Ciphertext,
    KeyShare,
    PartialResult,
    PublicKeyMaterial,
    SchemeId,
    ThresholdParams,
    b64,
    canonical_json,
    unb64,
)
from .errors import InvalidCiphertextError, MalformedError

TAG = b"quorumcrypt/BZ03"


class Bz03(DlogScheme):
    id = SchemeId.BZ03
    tag = TAG
    group = BN254_G2  # verification keys live in G2

    def deal(self, params: ThresholdParams, rng: random.Random, key_id: str = "default", **options):
        secret, xs = self._deal_scalars(params, rng)
        p1, p2 = BN254_G1.generator(), BN254_G2.generator()
        pk = PublicKeyMaterial(
            self.id, params, p2 * secret, tuple(p2 * x for x in xs), {"g1_public_key": p1 * secret}, key_id,
        )
        return pk, [KeyShare(self.id, i, x, pk) for i, x in zip(params.indices, xs)]

    def public_key_consistent(self, pk: PublicKeyMaterial) -> bool:
        return pairing(pk.aux["g1_public_key"], BN254_G2.generator()) == pairing(BN254_G1.generator(), pk.group_public_key)

    def _tag_base(self, pk, u, payload: bytes, label: bytes):
        return BN254_G2.hash_to_group(TAG + b"/tag", pk.fingerprint + u.encode() + len(label).to_bytes(8, "big") + label + payload)

    def encrypt(self, pk: PublicKeyMaterial, label: bytes, plaintext: bytes, rng: random.Random) -> Ciphertext:
        r = rng.randrange(1, BN254_G1.order)
        u = BN254_G1.generator() * r
        key = symmetric.derive_key(TAG, (pk.aux["g1_public_key"] * r).encode())
        payload = symmetric.seal(key, symmetric.derive_nonce(TAG, u.encode()), plaintext, label)
        w = self._tag_base(pk, u, payload, label) * r
        return Ciphertext(self.id, bytes(label), (u,), (w,), payload)

    def verify_ciphertext(self, pk: PublicKeyMaterial, c: Ciphertext) -> bool:
        if c.scheme is not self.id or len(c.encapsulation) != 1 or len(c.proof) != 1:
            raise MalformedError("not a BZ03 ciphertext")
        (u,), (w,) = c.encapsulation, c.proof
        if u.is_identity():
            return False
        return pairing(u, self._tag_base(pk, u, c.payload, c.label)) == pairing(BN254_G1.generator(), w)

    def request_bytes(self, c: Ciphertext) -> bytes:
        return self.ciphertext_to_bytes(c)

    def request_label(self, c: Ciphertext) -> bytes:
        return c.label

    def create_share(self, share: KeyShare, c: Ciphertext, rng: random.Random) -> PartialResult:
        if not self.verify_ciphertext(share.public, c):
            raise InvalidCiphertextError("refusing to release a share for an invalid ciphertext")
        return PartialResult(self.id, self.binding(share.public, c), share.index, c.encapsulation[0] * share.secret)

    def _verify_share(self, pk, c: Ciphertext, p: PartialResult) -> bool:
        return pairing(p.value, BN254_G2.generator()) == pairing(c.encapsulation[0], pk.verification_key(p.index))

    def _combine(self, pk, c: Ciphertext, partials) -> bytes:
        lam = lagrange_coefficients([p.index for p in partials], BN254_G1.order)
        shared = BN254_G1.identity()
        for p in partials:
            shared = shared + p.value * lam[p.index]
        key = symmetric.derive_key(TAG, shared.encode())
        return symmetric.open_(key, symmetric.derive_nonce(TAG, c.encapsulation[0].encode()), c.payload, c.label)

    def verify_result(self, pk, c, result) -> bool:
        return isinstance(result, bytes)

    def public_to_dict(self, pk):
        d = self._base_public_dict(pk)
        d["public_key"] = b64(pk.group_public_key.encode())
        d["verification_keys"] = [b64(v.encode()) for v in pk.verification_keys]
        d["aux"] = {"g1_public_key": b64(pk.aux["g1_public_key"].encode())}
        return d

    def public_from_dict(self, record):
        params = self._params_from(record)
        try:
            return PublicKeyMaterial(
                self.id, params, decode_element(BN254_G2, unb64(record["public_key"])),
                self._decode_vks(BN254_G2, record, params),
                {"g1_public_key": decode_element(BN254_G1, unb64(record["aux"]["g1_public_key"]))},
                record.get("key_id", "default"),
            )
        except KeyError as exc:
            raise MalformedError(f"missing field {exc}") from exc

    def value_to_bytes(self, value) -> bytes:
        return value.encode()

    def value_from_bytes(self, data, pk=None):
        return decode_element(BN254_G1, data)

    def ciphertext_to_bytes(self, c: Ciphertext) -> bytes:
        return canonical_json({
            "scheme": self.id.value,
            "label": b64(c.label),
            "encapsulation": [b64(c.encapsulation[0].encode())],
            "proof": [b64(c.proof[0].encode())],
            "payload": b64(c.payload),
        })

    def ciphertext_from_bytes(self, data: bytes) -> Ciphertext:
        try:
            record = json.loads(data)
            if record["scheme"] != self.id.value:
                raise MalformedError("ciphertext for another scheme")
            if len(record["encapsulation"]) != 1 or len(record["proof"]) != 1:
                raise MalformedError("BZ03 ciphertexts carry one element and one tag")
            u = decode_element(BN254_G1, unb64(record["encapsulation"][0]))
            w = decode_element(BN254_G2, unb64(record["proof"][0]))
            return Ciphertext(self.id, unb64(record["label"]), (u,), (w,), unb64(record["payload"]))
        except MalformedError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedError("undecodable BZ03 ciphertext") from exc

    def result_to_bytes(self, result: bytes, pk=None) -> bytes:
        return result

    def result_from_bytes(self, data: bytes, pk=None) -> bytes:
        return data
